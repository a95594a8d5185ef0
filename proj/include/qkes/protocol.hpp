#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkes/adversary.hpp"
#include "qkes/bits.hpp"
#include "qkes/coding.hpp"
#include "qkes/keystore.hpp"
#include "qkes/pauli_frame.hpp"
#include "qkes/rng.hpp"
#include "qkes/statevec.hpp"
#include "qkes/transcript.hpp"

namespace qkes::proto {

struct protocol_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SessionConfig {
    ProtocolKind protocol = ProtocolKind::p3;
    int N = 1;
    double t_x = 0.07;
    double t_z = 0.07;
    double delta = 0.03;
    double r = 1.0;
    std::uint64_t seed = 0;
    double threshold = -1.0;  // negative: min(t_x, t_z) + delta / 2
    int auth_len = 200;

    void validate() const {
        if (N < 1) throw std::invalid_argument("SessionConfig: N must be >= 1");
        if (r <= 0.0) throw std::invalid_argument("SessionConfig: r must be positive");
        if (t_x < 0 || t_z < 0 || delta < 0)
            throw std::invalid_argument("SessionConfig: negative rate parameter");
        if (t_x + delta >= 0.11 || t_z + delta >= 0.11)
            throw std::invalid_argument(
                "SessionConfig: t_x + delta and t_z + delta must stay below 11%");
        if (auth_len < 1)
            throw std::invalid_argument("SessionConfig: auth_len must be positive");
    }

    double effective_threshold() const {
        return threshold >= 0.0 ? threshold : std::min(t_x, t_z) + delta / 2.0;
    }

    // 2k, rounded up to even so the X- and Z-basis test counts are equal.
    int test_qubit_count() const {
        int two_k = static_cast<int>(std::ceil(r * N - 1e-12));
        if (two_k < 2) two_k = 2;
        if (two_k % 2 != 0) ++two_k;
        return two_k;
    }
};

// Everything derivable from the config once per experiment: block sizes,
// the two codes, and the bit budget of the test-description string b'.
// Immutable after construction; sessions share it read-only.
struct SessionPlan {
    SessionConfig config;
    int M = 0;
    int two_k = 0;
    int k = 0;
    double threshold = 0.0;
    code::LinearCode c_x;
    code::LinearCode c_z;
    code::BigInt position_count;  // C(M + 2k, 2k)
    code::BigInt basis_count;     // C(2k, k)
    int position_rank_bits = 0;
    int m_prime = 0;              // position_rank_bits + 4k
    code::BinomialTable binomials{0};

    static SessionPlan make(const SessionConfig& cfg) {
        cfg.validate();
        SessionPlan plan;
        plan.config = cfg;
        plan.two_k = cfg.test_qubit_count();
        plan.k = plan.two_k / 2;
        plan.threshold = cfg.effective_threshold();
        const double worst = std::max(cfg.t_x, cfg.t_z);
        plan.M = code::expanded_length(cfg.N, worst, cfg.delta);
        const int radius_x =
            static_cast<int>(std::ceil((cfg.t_x + cfg.delta) * plan.M - 1e-12));
        const int radius_z =
            static_cast<int>(std::ceil((cfg.t_z + cfg.delta) * plan.M - 1e-12));
        plan.c_x = code::best_code_for_rate(plan.M, cfg.N, radius_x);
        plan.c_z = code::best_code_for_rate(plan.M, cfg.N, radius_z);
        plan.binomials = code::BinomialTable(plan.M + plan.two_k);
        plan.position_count = plan.binomials.at(plan.M + plan.two_k, plan.two_k);
        plan.basis_count = plan.binomials.at(plan.two_k, plan.k);
        plan.position_rank_bits = code::bits_for_count(plan.position_count);
        plan.m_prime = plan.position_rank_bits + 2 * plan.two_k;
        return plan;
    }
};

// Test-qubit layout decoded from the secret string b': positions within the
// sequence, per-slot values, and an exactly half-and-half basis assignment.
struct TestLayout {
    std::vector<int> positions;  // sorted, size 2k
    Bits values;                 // size 2k
    std::vector<Basis> bases;    // size 2k, exactly k of each
};

inline TestLayout derive_test_layout(const SessionPlan& plan, const Bits& b_prime) {
    if (static_cast<int>(b_prime.size()) < plan.m_prime)
        throw std::invalid_argument("derive_test_layout: b' too short");
    TestLayout layout;

    const Bits rank_bits(b_prime.begin(), b_prime.begin() + plan.position_rank_bits);
    code::BigInt rank = code::bigint_from_bits(rank_bits) % plan.position_count;
    layout.positions = code::combinadic_unrank(
        {plan.M + plan.two_k, plan.two_k, rank}, plan.binomials);

    layout.values.assign(b_prime.begin() + plan.position_rank_bits,
                         b_prime.begin() + plan.position_rank_bits + plan.two_k);

    const Bits basis_bits(b_prime.begin() + plan.position_rank_bits + plan.two_k,
                          b_prime.begin() + plan.position_rank_bits + 2 * plan.two_k);
    code::BigInt basis_rank = code::bigint_from_bits(basis_bits) % plan.basis_count;
    const std::vector<int> x_slots =
        code::combinadic_unrank({plan.two_k, plan.k, basis_rank}, plan.binomials);

    layout.bases.assign(plan.two_k, Basis::Z);
    for (int slot : x_slots) layout.bases[slot] = Basis::X;
    return layout;
}

namespace detail {

inline Bits frames_as_bits(const std::vector<frame::QubitFrame>& frames) {
    Bits b;
    b.reserve(frames.size() * 2);
    for (const auto& f : frames) {
        b.push_back(f.prep_basis == Basis::X);
        b.push_back(f.prep_bit);
    }
    return b;
}

inline void log_event(SessionTranscript& t, int step, const std::string& dir,
                      const std::string& kind, const Bits& payload,
                      const std::string& note = {}) {
    t.events.push_back(TranscriptEvent{step, dir, kind, payload.size(),
                                       digest(payload), note});
}

inline proto::ProtocolMessage relay_classical(adv::Eavesdropper& eve,
                                              const ProtocolMessage& msg, Rng& rng) {
    return eve.on_classical(msg, rng);
}

inline void interpose_quantum(adv::Eavesdropper& eve,
                              std::vector<frame::QubitFrame>& frames, Rng& rng) {
    std::vector<adv::TransitQubit> handles;
    handles.reserve(frames.size());
    for (auto& f : frames) handles.emplace_back(&f);
    eve.on_quantum(handles, rng);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Protocol 1: classical one-time pad over Z-basis qubits
// ---------------------------------------------------------------------------

inline SessionTranscript run_protocol1(const SessionConfig& config, const Bits& key,
                                       const Bits& message,
                                       const frame::PauliChannelParams& channel,
                                       Rng& rng, adv::Eavesdropper* eve = nullptr,
                                       std::uint64_t session_id = 0) {
    const int N = static_cast<int>(message.size());
    if (N < 1 || N != config.N)
        throw std::invalid_argument("run_protocol1: message length must equal N");
    if (key.size() < message.size())
        throw std::invalid_argument("run_protocol1: key too short");

    SessionTranscript t;
    t.session_id = session_id;
    t.protocol = ProtocolKind::p1;

    std::vector<frame::QubitFrame> frames(N);
    for (int i = 0; i < N; ++i) {
        frames[i].prep_basis = Basis::Z;
        frames[i].prep_bit = key[i] ^ message[i];
        frames[i].origin = frame::Origin::message;
        frames[i].position = i;
    }
    detail::log_event(t, 1, "A->B", "quantum", detail::frames_as_bits(frames));
    if (eve) detail::interpose_quantum(*eve, frames, rng);
    frames = frame::transmit(std::move(frames), channel, rng);

    Bits received(N);
    for (int i = 0; i < N; ++i)
        received[i] = static_cast<std::uint8_t>(frame::measure_frame(frames[i], Basis::Z, rng));
    t.decoded = xor_bits(received, Bits(key.begin(), key.begin() + N));
    t.realized_message_error_weight =
        static_cast<int>(hamming_weight(xor_bits(t.decoded, message)));
    detail::log_event(t, 2, "local", "decode", t.decoded, "pad removed, key consumed");

    t.outcome = Outcome::delivered;
    t.qubits_sent = N;
    t.bits_consumed = N;  // the pad is one-time
    t.eve_bits_learned = 0;  // the wire carries only the padded string
    return t;
}

// ---------------------------------------------------------------------------
// Protocol 2: EPR/CNOT encryption on the exact few-qubit kernel
// ---------------------------------------------------------------------------

inline constexpr int kProtocol2MaxBits = 6;

inline Pauli bell_residual(const sv::StateVector& state) {
    // Joint state on qubits (0,1,2); returns which Pauli maps phi+ to the
    // pair's component. The state is a (pair) x (message) product, so exactly
    // one Bell projector has unit weight.
    const std::array<std::pair<sv::Bell, Pauli>, 4> table{{
        {sv::Bell::phi_plus, Pauli::I},
        {sv::Bell::psi_plus, Pauli::X},
        {sv::Bell::psi_minus, Pauli::Y},
        {sv::Bell::phi_minus, Pauli::Z},
    }};
    for (const auto& [bell, pauli] : table) {
        const sv::StateVector ref = sv::make_bell(bell);
        double weight = 0;
        for (int m = 0; m < 2; ++m) {
            cplx inner(0, 0);
            for (int i = 0; i < 4; ++i)
                inner += std::conj(ref.amps[i]) * state.amps[(m << 2) | i];
            weight += std::norm(inner);
        }
        if (weight > 1.0 - 1e-9) return pauli;
    }
    throw protocol_error("bell_residual: state is not a pair/message product");
}

inline SessionTranscript run_protocol2(const SessionConfig& config, const Bits& message,
                                       const frame::PauliChannelParams& channel,
                                       Rng& rng, std::uint64_t session_id = 0) {
    const int N = static_cast<int>(message.size());
    if (N != config.N)
        throw std::invalid_argument("run_protocol2: message length must equal N");
    if (N > kProtocol2MaxBits)
        throw std::invalid_argument("run_protocol2: state-vector scale exceeded");
    channel.validate();

    SessionTranscript t;
    t.session_id = session_id;
    t.protocol = ProtocolKind::p2;
    t.decoded.resize(N);
    t.pair_residuals.resize(N);

    for (int i = 0; i < N; ++i) {
        // Pair on qubits (0,1); message qubit 2 prepared as |s_i> in Z.
        sv::StateVector state = sv::tensor(
            sv::make_bell(sv::Bell::phi_plus),
            sv::make_basis_state(1, static_cast<std::uint64_t>(message[i])));
        state = sv::apply_cnot(state, 0, 2);
        const Pauli err = frame::sample_pauli(channel, rng);
        if (err != Pauli::I) state = sv::apply_pauli(state, err, 2);
        state = sv::apply_cnot(state, 1, 2);

        t.pair_residuals[i] = bell_residual(state);
        auto [bit, post] = sv::measure(state, 2, Basis::Z, rng);
        (void)post;
        t.decoded[i] = static_cast<std::uint8_t>(bit);
    }

    detail::log_event(t, 1, "A->B", "quantum", message, "one encrypted qubit per bit");
    detail::log_event(t, 2, "local", "decode", t.decoded);
    t.realized_message_error_weight =
        static_cast<int>(hamming_weight(xor_bits(t.decoded, message)));
    t.outcome = Outcome::delivered;
    t.qubits_sent = N;
    return t;
}

// ---------------------------------------------------------------------------
// Protocol 3: deterministic key expansion with recyclable key
// ---------------------------------------------------------------------------

struct Protocol3Options {
    // Reuse b' and d from a prior successful session instead of allocating
    // fresh ones (both stay active after success).
    const keys::SessionAllocation* prior_alice = nullptr;
    const keys::SessionAllocation* prior_bob = nullptr;
    // Out-parameters for chaining reuse across sessions.
    keys::SessionAllocation* alice_allocation_out = nullptr;
    keys::SessionAllocation* bob_allocation_out = nullptr;
};

inline SessionTranscript run_protocol3(keys::SharedKeyStore& alice_store,
                                       keys::SharedKeyStore& bob_store,
                                       const Bits& message, const SessionPlan& plan,
                                       const frame::PauliChannelParams& channel,
                                       adv::Eavesdropper& eve, Rng& rng,
                                       std::uint64_t session_id = 0,
                                       const Protocol3Options& opts = {}) {
    if (static_cast<int>(message.size()) != plan.config.N)
        throw std::invalid_argument("run_protocol3: message length must equal N");
    if (!alice_store.identical_to(bob_store))
        throw protocol_error("run_protocol3: key stores are not synchronized");
    channel.validate();

    SessionTranscript t;
    t.session_id = session_id;
    t.protocol = ProtocolKind::p3;
    const auto accounting_before = alice_store.accounting();

    // Step 2: substring allocation, left to right.
    const int session_no = static_cast<int>(session_id);
    keys::SessionAllocation a_alloc, b_alloc;
    if (opts.prior_alice && opts.prior_bob) {
        a_alloc = keys::allocate_reusing(alice_store, plan.M, *opts.prior_alice,
                                         plan.config.auth_len, session_no);
        b_alloc = keys::allocate_reusing(bob_store, plan.M, *opts.prior_bob,
                                         plan.config.auth_len, session_no);
    } else {
        a_alloc = keys::allocate(alice_store, plan.M, plan.m_prime,
                                 plan.config.auth_len, session_no);
        b_alloc = keys::allocate(bob_store, plan.M, plan.m_prime,
                                 plan.config.auth_len, session_no);
    }
    detail::log_event(t, 2, "local", "allocate", a_alloc.b_prime,
                      "b,b',c,d taken from G");

    // Step 3: expand, encrypt, and mix in the test qubits.
    Bits padded = message;
    padded.resize(plan.c_x.k, 0);
    const Bits expanded = code::encode(plan.c_x, padded);
    const Bits cipher = xor_bits(expanded, a_alloc.b);
    const TestLayout layout = derive_test_layout(plan, a_alloc.b_prime);

    const int total = plan.M + plan.two_k;
    std::vector<frame::QubitFrame> frames(total);
    {
        std::set<int> test_positions(layout.positions.begin(), layout.positions.end());
        int slot = 0, msg_index = 0;
        for (int pos = 0; pos < total; ++pos) {
            frame::QubitFrame& f = frames[pos];
            f.position = pos;
            if (test_positions.count(pos)) {
                f.origin = frame::Origin::test;
                f.prep_basis = layout.bases[slot];
                f.prep_bit = layout.values[slot];
                ++slot;
            } else {
                f.origin = frame::Origin::message;
                f.prep_basis = Basis::Z;
                f.prep_bit = cipher[msg_index];
                ++msg_index;
            }
        }
    }

    // Step 4: transmission through the adversary and the channel.
    detail::log_event(t, 4, "A->B", "quantum", detail::frames_as_bits(frames));
    detail::interpose_quantum(eve, frames, rng);
    frames = frame::transmit(std::move(frames), channel, rng);
    t.qubits_sent = total;
    alice_store.note_qubits_sent(total);
    bob_store.note_qubits_sent(total);

    // Step 5: Bob reads the layout from his own copy of b', measures in the
    // correct bases, and checks the test bits.
    const TestLayout bob_layout = derive_test_layout(plan, b_alloc.b_prime);
    Bits measured(total);
    {
        std::set<int> test_positions(bob_layout.positions.begin(),
                                     bob_layout.positions.end());
        int slot = 0;
        for (int pos = 0; pos < total; ++pos) {
            const Basis basis =
                test_positions.count(pos) ? bob_layout.bases[slot] : Basis::Z;
            if (test_positions.count(pos)) ++slot;
            measured[pos] = static_cast<std::uint8_t>(
                frame::measure_frame(frames[pos], basis, rng));
        }
    }
    int errors_x = 0, errors_z = 0;
    for (int slot = 0; slot < plan.two_k; ++slot) {
        const bool wrong =
            measured[bob_layout.positions[slot]] != bob_layout.values[slot];
        if (bob_layout.bases[slot] == Basis::Z) errors_x += wrong;
        else errors_z += wrong;
    }
    t.rates_measured = true;
    t.t_x0 = static_cast<double>(errors_x) / plan.k;
    t.t_z0 = static_cast<double>(errors_z) / plan.k;
    const bool rates_ok = t.t_x0 <= plan.threshold && t.t_z0 <= plan.threshold;
    detail::log_event(t, 5, "local", "rates", measured,
                      "t_x0=" + std::to_string(t.t_x0) +
                          ";t_z0=" + std::to_string(t.t_z0));

    // Step 6 (receiver side): decrypt and decode. Run before the reply so a
    // decode failure can share the abort signal and keep both stores in step.
    Bits bob_message;
    std::optional<code::DecodeResult> decoded;
    if (rates_ok) {
        Bits cipher_rx;
        cipher_rx.reserve(plan.M);
        std::set<int> test_positions(bob_layout.positions.begin(),
                                     bob_layout.positions.end());
        for (int pos = 0; pos < total; ++pos)
            if (!test_positions.count(pos)) cipher_rx.push_back(measured[pos]);
        const Bits expanded_rx = xor_bits(cipher_rx, b_alloc.b);
        t.realized_message_error_weight =
            static_cast<int>(hamming_weight(xor_bits(expanded_rx, expanded)));
        decoded = code::decode(plan.c_x, expanded_rx);
        if (decoded) {
            bob_message.assign(decoded->message.begin(),
                               decoded->message.begin() + plan.config.N);
            t.decode_errors_corrected = decoded->errors_found;
        }
    }

    const bool bob_continues = rates_ok && decoded.has_value();
    ProtocolMessage reply;
    reply.sender = Party::bob;
    if (bob_continues) {
        reply.kind = MessageKind::classical_ack;
        reply.payload = b_alloc.c;
        bob_store.consume(b_alloc.c_idx);
        // Step 8, receiver side.
        const Bits coset = code::coset_index(plan.c_z, b_alloc.b);
        bob_store.recycle(b_alloc.b_idx, coset);
        detail::log_event(t, 5, "B->A", "classical", reply.payload, "continue reply");
    } else {
        reply.kind = MessageKind::abort_notice;
        reply.payload = xor_bits(b_alloc.c, b_alloc.d);
        bob_store.consume(b_alloc.c_idx);
        bob_store.consume(b_alloc.d_idx);
        detail::log_event(t, 5, "B->A", "classical", reply.payload, "abort reply");
    }

    const ProtocolMessage delivered_reply = detail::relay_classical(eve, reply, rng);

    // Step 7: sender-side authentication of the reply.
    const Bits abort_signal = xor_bits(a_alloc.c, a_alloc.d);
    if (delivered_reply.payload == a_alloc.c) {
        alice_store.consume(a_alloc.c_idx);
        const Bits coset = code::coset_index(plan.c_z, a_alloc.b);
        alice_store.recycle(a_alloc.b_idx, coset);
        if (bob_continues) {
            t.outcome = Outcome::delivered;
            t.decoded = bob_message;
            t.recycled = coset;
        } else {
            // Forged continue over a receiver abort: sender recycled, the
            // receiver did not. Detectable only out of band.
            t.outcome = rates_ok ? Outcome::decode_failure : Outcome::aborted_by_bob;
        }
        detail::log_event(t, 7, "local", "auth", a_alloc.c, "reply matches c");
    } else if (delivered_reply.payload == abort_signal) {
        alice_store.consume(a_alloc.c_idx);
        alice_store.consume(a_alloc.d_idx);
        t.outcome = bob_continues
                        ? Outcome::aborted_by_alice  // forged abort over success
                        : (rates_ok ? Outcome::decode_failure : Outcome::aborted_by_bob);
        if (bob_continues) t.decoded = bob_message;  // quarantined
        detail::log_event(t, 7, "local", "auth", delivered_reply.payload,
                          "abort reply recognized");
    } else {
        alice_store.consume(a_alloc.c_idx);
        alice_store.consume(a_alloc.d_idx);
        t.outcome = Outcome::aborted_by_alice;
        if (bob_continues) t.decoded = bob_message;  // quarantined
        detail::log_event(t, 7, "local", "auth", delivered_reply.payload,
                          "reply is neither c nor c xor d");
    }

    const auto accounting_after = alice_store.accounting();
    t.bits_consumed = accounting_after.bits_consumed - accounting_before.bits_consumed;
    t.bits_recycled = accounting_after.bits_recycled - accounting_before.bits_recycled;
    t.eve_bits_learned = 0;  // everything on the wire is padded or secret-derived

    detail::log_event(t, 8, "local", "outcome",
                      Bits{static_cast<std::uint8_t>(t.outcome)},
                      outcome_name(t.outcome));
    if (opts.alice_allocation_out) *opts.alice_allocation_out = a_alloc;
    if (opts.bob_allocation_out) *opts.bob_allocation_out = b_alloc;
    return t;
}

// ---------------------------------------------------------------------------
// Naive direct-communication baseline: plaintext message qubits plus
// publicly revealed test qubits
// ---------------------------------------------------------------------------

inline SessionTranscript run_naive_baseline(const SessionConfig& config,
                                            const Bits& message,
                                            const frame::PauliChannelParams& channel,
                                            adv::Eavesdropper& eve, Rng& rng,
                                            std::uint64_t session_id = 0) {
    const int N = static_cast<int>(message.size());
    if (N != config.N)
        throw std::invalid_argument("run_naive_baseline: message length must equal N");
    channel.validate();

    SessionTranscript t;
    t.session_id = session_id;
    t.protocol = ProtocolKind::naive_baseline;

    const int m = config.test_qubit_count();
    const int total = N + m;

    // Random test positions; exactly half of the slots in X basis.
    std::vector<int> order(total);
    for (int i = 0; i < total; ++i) order[i] = i;
    for (int i = 0; i < m; ++i)
        std::swap(order[i], order[i + rng.below(total - i)]);
    std::vector<int> positions(order.begin(), order.begin() + m);
    std::sort(positions.begin(), positions.end());

    std::vector<int> slots(m);
    for (int i = 0; i < m; ++i) slots[i] = i;
    for (int i = 0; i < m / 2; ++i)
        std::swap(slots[i], slots[i + rng.below(m - i)]);
    std::vector<Basis> bases(m, Basis::Z);
    for (int i = 0; i < m / 2; ++i) bases[slots[i]] = Basis::X;
    const Bits values = rng.bits(m);

    std::vector<frame::QubitFrame> frames(total);
    {
        std::set<int> test_positions(positions.begin(), positions.end());
        int slot = 0, msg_index = 0;
        for (int pos = 0; pos < total; ++pos) {
            frame::QubitFrame& f = frames[pos];
            f.position = pos;
            if (test_positions.count(pos)) {
                f.origin = frame::Origin::test;
                f.prep_basis = bases[slot];
                f.prep_bit = values[slot];
                ++slot;
            } else {
                f.origin = frame::Origin::message;
                f.prep_basis = Basis::Z;
                f.prep_bit = message[msg_index];
                ++msg_index;
            }
        }
    }

    detail::log_event(t, 1, "A->B", "quantum", detail::frames_as_bits(frames));
    detail::interpose_quantum(eve, frames, rng);
    frames = frame::transmit(std::move(frames), channel, rng);
    t.qubits_sent = total;

    // Public reveal of the test description (no pre-shared secret exists).
    ProtocolMessage reveal;
    reveal.kind = MessageKind::test_reveal;
    reveal.sender = Party::alice;
    reveal.reveal_positions = positions;
    reveal.reveal_bases = bases;
    reveal.reveal_values = values;
    detail::log_event(t, 2, "A->B", "classical", values, "test reveal");
    (void)detail::relay_classical(eve, reveal, rng);

    std::set<int> test_positions(positions.begin(), positions.end());
    Bits received_message;
    bool detected = false;
    int slot = 0;
    for (int pos = 0; pos < total; ++pos) {
        if (test_positions.count(pos)) {
            const int got = frame::measure_frame(frames[pos], bases[slot], rng);
            if (got != values[slot]) detected = true;
            ++slot;
        } else {
            received_message.push_back(static_cast<std::uint8_t>(
                frame::measure_frame(frames[pos], Basis::Z, rng)));
        }
    }

    t.naive_detected = detected;
    for (int pos = 0; pos < total; ++pos)
        if (!test_positions.count(pos) && eve.view().measured_position(pos)) {
            t.naive_message_hit = true;
            ++t.eve_bits_learned;
        }
    t.rates_measured = false;
    t.outcome = detected ? Outcome::aborted_by_bob : Outcome::delivered;
    if (!detected) t.decoded = received_message;
    t.realized_message_error_weight =
        static_cast<int>(hamming_weight(xor_bits(received_message, message)));
    detail::log_event(t, 3, "local", "outcome",
                      Bits{static_cast<std::uint8_t>(t.outcome)},
                      outcome_name(t.outcome));
    return t;
}

// ---------------------------------------------------------------------------
// Leakage audit: per-bit plug-in mutual information between a secret string
// and the adversary's declared view
// ---------------------------------------------------------------------------

// The joint plug-in estimator over the full view alphabet degenerates at
// feasible session counts (every view distinct), so the audit sums per-bit
// plug-in estimates I(secret_i ; view_i) over 2x3 tables. For independent
// uniform secret bits this lower-bounds the joint leakage and carries
// negligible small-sample bias at the session counts used here.
class LeakageAuditor {
public:
    explicit LeakageAuditor(int secret_bits)
        : counts_(secret_bits), sessions_(0) {}

    void add(const Bits& secret, const std::vector<int>& view_estimate) {
        if (secret.size() != counts_.size() || view_estimate.size() != counts_.size())
            throw std::invalid_argument("LeakageAuditor: length mismatch");
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            const int v = view_estimate[i] < 0 ? 2 : view_estimate[i];
            ++counts_[i][secret[i]][v];
        }
        ++sessions_;
    }

    std::uint64_t sessions() const { return sessions_; }

    double estimate_bits() const {
        if (sessions_ == 0) return 0.0;
        const double total = static_cast<double>(sessions_);
        double mi_sum = 0.0;
        for (const auto& table : counts_) {
            double marg_s[2] = {0, 0};
            double marg_v[3] = {0, 0, 0};
            for (int s = 0; s < 2; ++s)
                for (int v = 0; v < 3; ++v) {
                    marg_s[s] += table[s][v];
                    marg_v[v] += table[s][v];
                }
            double mi = 0.0;
            for (int s = 0; s < 2; ++s)
                for (int v = 0; v < 3; ++v) {
                    const double joint = table[s][v];
                    if (joint == 0) continue;
                    mi += joint / total *
                          std::log2(joint * total / (marg_s[s] * marg_v[v]));
                }
            mi_sum += std::max(0.0, mi);
        }
        return mi_sum;
    }

private:
    std::vector<std::array<std::array<std::uint64_t, 3>, 2>> counts_;
    std::uint64_t sessions_;
};

} // namespace qkes::proto
