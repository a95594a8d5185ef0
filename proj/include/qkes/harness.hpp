#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkes/adversary.hpp"
#include "qkes/coding.hpp"
#include "qkes/keystore.hpp"
#include "qkes/oracle.hpp"
#include "qkes/pauli_frame.hpp"
#include "qkes/protocol.hpp"
#include "qkes/rng.hpp"
#include "qkes/statevec.hpp"

namespace qkes::harness {

// ---------------------------------------------------------------------------
// Experiment specification: declarative key = value sections plus CLI
// overrides applied by the tool
// ---------------------------------------------------------------------------

struct ExperimentSpec {
    proto::SessionConfig session;
    frame::PauliChannelParams channel;
    adv::AdversarySpec adversary;
    std::uint64_t num_sessions = 1;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    // continuous: one long-lived store pair across all sessions.
    // per_session: fresh synchronized stores each session (used for forgery
    // experiments, where a tampered reply desynchronizes the parties).
    bool per_session_stores = false;

    void validate() const {
        if (num_sessions < 1)
            throw std::invalid_argument("ExperimentSpec: num_sessions must be >= 1");
        session.validate();
        channel.validate();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace detail

inline proto::ProtocolKind protocol_from_name(const std::string& name) {
    if (name == "p1") return proto::ProtocolKind::p1;
    if (name == "p2") return proto::ProtocolKind::p2;
    if (name == "p3") return proto::ProtocolKind::p3;
    if (name == "naive_baseline" || name == "naive")
        return proto::ProtocolKind::naive_baseline;
    throw std::invalid_argument("unknown protocol: " + name);
}

inline ExperimentSpec parse_experiment_spec(std::istream& in) {
    ExperimentSpec spec;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("spec line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section == "session") {
            if (key == "protocol") spec.session.protocol = protocol_from_name(value);
            else if (key == "N") spec.session.N = std::stoi(value);
            else if (key == "t_x") spec.session.t_x = std::stod(value);
            else if (key == "t_z") spec.session.t_z = std::stod(value);
            else if (key == "delta") spec.session.delta = std::stod(value);
            else if (key == "r") spec.session.r = std::stod(value);
            else if (key == "threshold") spec.session.threshold = std::stod(value);
            else if (key == "auth_len") spec.session.auth_len = std::stoi(value);
            else throw std::invalid_argument("unknown session key: " + key);
        } else if (section == "channel") {
            if (key == "p_x") spec.channel.p_x = std::stod(value);
            else if (key == "p_y") spec.channel.p_y = std::stod(value);
            else if (key == "p_z") spec.channel.p_z = std::stod(value);
            else throw std::invalid_argument("unknown channel key: " + key);
        } else if (section == "adversary") {
            if (key == "kind") spec.adversary.kind = adv::adversary_kind_from_name(value);
            else if (key == "fraction") spec.adversary.fraction = std::stod(value);
            else if (key == "basis")
                spec.adversary.basis = value == "X" ? Basis::X : Basis::Z;
            else if (key == "forge_mode") {
                if (value == "random") spec.adversary.forge_mode = adv::ForgeMode::random;
                else if (value == "replay") spec.adversary.forge_mode = adv::ForgeMode::replay;
                else if (value == "flip") spec.adversary.forge_mode = adv::ForgeMode::flip;
                else throw std::invalid_argument("unknown forge_mode: " + value);
            } else throw std::invalid_argument("unknown adversary key: " + key);
        } else if (section == "experiment") {
            if (key == "sessions") spec.num_sessions = std::stoull(value);
            else if (key == "seed") spec.seed = std::stoull(value);
            else if (key == "out_dir") spec.out_dir = value;
            else if (key == "store_mode") spec.per_session_stores = value == "per_session";
            else throw std::invalid_argument("unknown experiment key: " + key);
        } else {
            throw std::invalid_argument("key outside a known section: " + key);
        }
    }
    spec.session.seed = spec.seed;
    return spec;
}

inline ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file: " + path);
    return parse_experiment_spec(in);
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct AggregateReport {
    std::uint64_t sessions = 0;
    std::uint64_t delivered = 0;
    std::uint64_t aborted_by_bob = 0;
    std::uint64_t aborted_by_alice = 0;
    std::uint64_t decode_failure = 0;
    double mean_t_x0 = 0.0;
    double mean_t_z0 = 0.0;
    std::uint64_t rate_samples = 0;
    std::uint64_t qubits_sent = 0;
    std::uint64_t bits_consumed = 0;
    std::uint64_t bits_recycled = 0;
    std::uint64_t delivered_message_bits = 0;
    std::uint64_t eve_bits_learned = 0;
    std::uint64_t undetected_leak_sessions = 0;  // adversary learned plaintext, no abort

    double delivered_fraction() const {
        return sessions ? static_cast<double>(delivered) / sessions : 0.0;
    }
    double qubits_per_delivered_bit() const {
        return delivered_message_bits
                   ? static_cast<double>(qubits_sent) / delivered_message_bits
                   : 0.0;
    }
    // Nominal comparator: textbook sifted-key cost of 2 transmitted qubits
    // per key bit, no error-correction overhead.
    static constexpr double kNominalQubitsPerBit = 2.0;
    double qubit_cost_ratio_vs_nominal() const {
        return delivered_message_bits
                   ? qubits_per_delivered_bit() / kNominalQubitsPerBit
                   : 0.0;
    }
    double net_key_cost_per_delivered_bit() const {
        return delivered_message_bits
                   ? static_cast<double>(bits_consumed - bits_recycled) /
                         static_cast<double>(delivered_message_bits)
                   : 0.0;
    }

    void add(const proto::SessionTranscript& t) {
        ++sessions;
        switch (t.outcome) {
            case proto::Outcome::delivered: ++delivered; break;
            case proto::Outcome::aborted_by_bob: ++aborted_by_bob; break;
            case proto::Outcome::aborted_by_alice: ++aborted_by_alice; break;
            case proto::Outcome::decode_failure: ++decode_failure; break;
        }
        if (t.rates_measured) {
            mean_t_x0 += t.t_x0;
            mean_t_z0 += t.t_z0;
            ++rate_samples;
        }
        qubits_sent += t.qubits_sent;
        bits_consumed += t.bits_consumed;
        bits_recycled += t.bits_recycled;
        if (t.outcome == proto::Outcome::delivered)
            delivered_message_bits += t.decoded.size();
        eve_bits_learned += t.eve_bits_learned;
        if (t.eve_bits_learned > 0 && t.outcome == proto::Outcome::delivered)
            ++undetected_leak_sessions;
    }

    void finalize() {
        if (rate_samples) {
            mean_t_x0 /= rate_samples;
            mean_t_z0 /= rate_samples;
        }
    }
};

inline std::string format_double(double v, int precision = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
}

inline std::string report_text(const AggregateReport& rep, const ExperimentSpec* spec) {
    std::ostringstream os;
    os << "experiment report\n";
    os << "=================\n";
    if (spec) {
        os << "protocol: " << proto::protocol_name(spec->session.protocol) << "\n";
        os << "N: " << spec->session.N << "  sessions: " << spec->num_sessions
           << "  seed: " << spec->seed << "\n";
        os << "channel: p_x=" << format_double(spec->channel.p_x, 4)
           << " p_y=" << format_double(spec->channel.p_y, 4)
           << " p_z=" << format_double(spec->channel.p_z, 4) << "\n";
        os << "adversary: " << adv::adversary_kind_name(spec->adversary.kind) << "\n";
    }
    os << "outcomes: delivered=" << rep.delivered
       << " aborted_by_bob=" << rep.aborted_by_bob
       << " aborted_by_alice=" << rep.aborted_by_alice
       << " decode_failure=" << rep.decode_failure << "\n";
    os << "delivered fraction: " << format_double(rep.delivered_fraction()) << "\n";
    if (rep.rate_samples)
        os << "mean test rates: t_x0=" << format_double(rep.mean_t_x0)
           << " t_z0=" << format_double(rep.mean_t_z0) << "\n";
    os << "qubits sent: " << rep.qubits_sent << "\n";
    os << "key bits consumed: " << rep.bits_consumed
       << "  recycled: " << rep.bits_recycled << "\n";
    if (rep.delivered_message_bits) {
        os << "qubits per delivered message bit: "
           << format_double(rep.qubits_per_delivered_bit()) << "\n";
        os << "ratio vs nominal 2 qubits/bit: "
           << format_double(rep.qubit_cost_ratio_vs_nominal()) << "\n";
        os << "net key cost per delivered bit: "
           << format_double(rep.net_key_cost_per_delivered_bit()) << "\n";
    }
    os << "eve plaintext bits learned: " << rep.eve_bits_learned << "\n";
    if (rep.eve_bits_learned)
        os << "undetected-leak rate: "
           << format_double(static_cast<double>(rep.undetected_leak_sessions) /
                            rep.sessions)
           << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Experiment runner
// ---------------------------------------------------------------------------

namespace detail {

inline void write_transcript_lines(std::ostream& os, const proto::SessionTranscript& t) {
    for (const auto& e : t.events) {
        os << "session=" << t.session_id << " step=" << e.step << " dir=" << e.dir
           << " kind=" << e.kind << " bits=" << e.bit_count
           << " digest=" << hex64(e.payload_digest);
        if (!e.note.empty()) os << " note=" << e.note;
        os << "\n";
    }
}

inline void write_csv_line(std::ostream& os, const proto::SessionTranscript& t) {
    os << t.session_id << ',' << proto::outcome_name(t.outcome) << ','
       << format_double(t.t_x0) << ',' << format_double(t.t_z0) << ','
       << t.decode_errors_corrected << ',' << t.bits_consumed << ','
       << t.bits_recycled << ',' << t.eve_bits_learned << "\n";
}

inline const char* kCsvHeader =
    "session_id,outcome,t_x0,t_z0,decode_errors_corrected,bits_consumed,"
    "bits_recycled,eve_bits_learned";

} // namespace detail

// Runs the configured batch of sessions with per-session derived seeds and
// writes summary.csv, transcripts.log, and report.txt under out_dir.
// Deterministic: identical spec and seed give byte-identical outputs.
inline AggregateReport run_experiment(const ExperimentSpec& spec,
                                      std::vector<proto::SessionTranscript>* out = nullptr) {
    spec.validate();
    Rng root(spec.seed);
    AggregateReport rep;

    std::filesystem::create_directories(spec.out_dir);
    std::ofstream csv(spec.out_dir + "/summary.csv");
    std::ofstream log(spec.out_dir + "/transcripts.log");
    if (!csv || !log)
        throw std::runtime_error("cannot write outputs under " + spec.out_dir);
    csv << detail::kCsvHeader << "\n";

    const bool is_p3 = spec.session.protocol == proto::ProtocolKind::p3;
    std::optional<proto::SessionPlan> plan;
    if (is_p3) plan = proto::SessionPlan::make(spec.session);

    // Continuous stores: provision enough for every session up front.
    keys::SharedKeyStore alice, bob;
    if (is_p3 && !spec.per_session_stores) {
        const std::uint64_t per_session =
            plan->M + plan->m_prime + 2ull * spec.session.auth_len;
        Rng pool_rng = root.derive(0x600DCAFEULL);
        const Bits pool = pool_rng.bits(per_session * spec.num_sessions);
        alice = keys::SharedKeyStore(pool);
        bob = keys::SharedKeyStore(pool);
    }

    Bits last_reply;  // wire for replay forgeries
    for (std::uint64_t i = 0; i < spec.num_sessions; ++i) {
        Rng session_rng = root.derive(i + 1);
        const Bits message = session_rng.bits(spec.session.N);

        adv::AdversarySpec adv_spec = spec.adversary;
        if (adv_spec.kind == adv::AdversaryKind::forge_classical &&
            adv_spec.forge_mode == adv::ForgeMode::replay)
            adv_spec.replay_payload = last_reply;
        auto eve = adv::make_eavesdropper(adv_spec);

        proto::SessionTranscript t;
        switch (spec.session.protocol) {
            case proto::ProtocolKind::p1: {
                const Bits key = session_rng.bits(spec.session.N);
                t = proto::run_protocol1(spec.session, key, message, spec.channel,
                                         session_rng, eve.get(), i);
                break;
            }
            case proto::ProtocolKind::p2:
                t = proto::run_protocol2(spec.session, message, spec.channel,
                                         session_rng, i);
                break;
            case proto::ProtocolKind::p3: {
                if (spec.per_session_stores) {
                    const std::uint64_t need =
                        plan->M + plan->m_prime + 2ull * spec.session.auth_len;
                    Rng pool_rng = session_rng.derive(0x600DCAFEULL);
                    const Bits pool = pool_rng.bits(need);
                    alice = keys::SharedKeyStore(pool);
                    bob = keys::SharedKeyStore(pool);
                }
                t = proto::run_protocol3(alice, bob, message, *plan, spec.channel,
                                         *eve, session_rng, i);
                break;
            }
            case proto::ProtocolKind::naive_baseline:
                t = proto::run_naive_baseline(spec.session, message, spec.channel,
                                              *eve, session_rng, i);
                break;
        }

        if (!eve->view().classical.empty()) last_reply = eve->view().classical.back();
        rep.add(t);
        detail::write_csv_line(csv, t);
        detail::write_transcript_lines(log, t);
        if (out) out->push_back(std::move(t));
    }
    rep.finalize();

    std::ofstream report(spec.out_dir + "/report.txt");
    report << report_text(rep, &spec);
    return rep;
}

// Re-aggregates counts from a transcripts.log written by run_experiment.
inline AggregateReport reaggregate_transcripts(std::istream& in) {
    AggregateReport rep;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string field;
        std::map<std::string, std::string> kv;
        while (fields >> field) {
            const auto eq = field.find('=');
            if (eq != std::string::npos)
                kv[field.substr(0, eq)] = field.substr(eq + 1);
        }
        if (kv["kind"] == "outcome") {
            ++rep.sessions;
            const std::string& o = kv["note"];
            if (o == "delivered") ++rep.delivered;
            else if (o == "aborted_by_bob") ++rep.aborted_by_bob;
            else if (o == "aborted_by_alice") ++rep.aborted_by_alice;
            else if (o == "decode_failure") ++rep.decode_failure;
        } else if (kv["kind"] == "rates") {
            const std::string& note = kv["note"];
            double tx = 0, tz = 0;
            if (std::sscanf(note.c_str(), "t_x0=%lf;t_z0=%lf", &tx, &tz) == 2) {
                rep.mean_t_x0 += tx;
                rep.mean_t_z0 += tz;
                ++rep.rate_samples;
            }
        }
    }
    rep.finalize();
    return rep;
}

// ---------------------------------------------------------------------------
// Leakage audit experiments
// ---------------------------------------------------------------------------

struct LeakageAuditResult {
    double message_mi_bits = 0.0;
    double recycled_mi_bits = 0.0;
    std::uint64_t sessions = 0;
    std::uint64_t delivered = 0;
};

// Uniformly random message per session, fresh stores and adversary instance
// per session; estimates per-bit mutual information between the secrets and
// the adversary's declared view.
inline LeakageAuditResult run_leakage_audit(const ExperimentSpec& spec) {
    spec.validate();
    Rng root(spec.seed);
    LeakageAuditResult result;
    proto::LeakageAuditor message_audit(spec.session.N);

    const bool is_p3 = spec.session.protocol == proto::ProtocolKind::p3;
    std::optional<proto::SessionPlan> plan;
    std::optional<proto::LeakageAuditor> recycled_audit;
    int recycled_len = 0;
    if (is_p3) {
        plan = proto::SessionPlan::make(spec.session);
        recycled_len = plan->M - plan->c_z.k;
        if (recycled_len > 0) recycled_audit.emplace(recycled_len);
    }

    for (std::uint64_t i = 0; i < spec.num_sessions; ++i) {
        Rng session_rng = root.derive(i + 1);
        const Bits message = session_rng.bits(spec.session.N);
        auto eve = adv::make_eavesdropper(spec.adversary);

        proto::SessionTranscript t;
        if (is_p3) {
            const std::uint64_t need =
                plan->M + plan->m_prime + 2ull * spec.session.auth_len;
            Rng pool_rng = session_rng.derive(0x600DCAFEULL);
            const Bits pool = pool_rng.bits(need);
            keys::SharedKeyStore alice(pool), bob(pool);
            t = proto::run_protocol3(alice, bob, message, *plan, spec.channel, *eve,
                                     session_rng, i);
        } else if (spec.session.protocol == proto::ProtocolKind::p1) {
            const Bits key = session_rng.bits(spec.session.N);
            t = proto::run_protocol1(spec.session, key, message, spec.channel,
                                     session_rng, eve.get(), i);
        } else if (spec.session.protocol == proto::ProtocolKind::naive_baseline) {
            t = proto::run_naive_baseline(spec.session, message, spec.channel, *eve,
                                          session_rng, i);
        } else {
            throw std::invalid_argument("run_leakage_audit: unsupported protocol");
        }

        message_audit.add(message, eve->message_estimate(spec.session.N));
        if (t.outcome == proto::Outcome::delivered) {
            ++result.delivered;
            if (recycled_audit) {
                std::vector<int> view(recycled_len);
                for (int j = 0; j < recycled_len; ++j)
                    view[j] = eve->view().bit_at(j);
                recycled_audit->add(t.recycled, view);
            }
        }
        ++result.sessions;
    }

    result.message_mi_bits = message_audit.estimate_bits();
    if (recycled_audit && recycled_audit->sessions() > 0)
        result.recycled_mi_bits = recycled_audit->estimate_bits();
    return result;
}

} // namespace qkes::harness
