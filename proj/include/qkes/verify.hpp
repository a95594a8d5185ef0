#pragma once

#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qkes/coding.hpp"
#include "qkes/harness.hpp"
#include "qkes/oracle.hpp"
#include "qkes/pauli_frame.hpp"
#include "qkes/protocol.hpp"
#include "qkes/statevec.hpp"

namespace qkes::harness {

// One-shot verification suite behind the `verify` CLI subcommand: replays
// the error-propagation table against the dense-matrix oracle, the frame
// model against the exact kernel, and the coding toolkit against exhaustive
// brute-force checks. Each check prints one table row.

struct VerifySummary {
    int passed = 0;
    int failed = 0;
    bool ok() const { return failed == 0; }
};

namespace verify_detail {

inline void report(std::ostream& os, VerifySummary& sum, const std::string& name,
                   const std::string& detail, bool ok) {
    os << std::left << std::setw(38) << name << std::setw(52) << detail
       << (ok ? "pass" : "FAIL") << "\n";
    ++(ok ? sum.passed : sum.failed);
}

// Enumerates every error pattern of weight <= t_correct on top of `word`
// and demands a correct bounded-distance decode, cross-checked against the
// brute-force nearest-codeword oracle.
inline bool all_weight_patterns_decode(const code::LinearCode& c,
                                       const std::vector<Bits>& words,
                                       const Bits& message, const Bits& word) {
    std::vector<std::vector<int>> frontier{{}};
    for (int w = 0; w <= c.t_correct; ++w) {
        std::vector<std::vector<int>> next;
        for (const auto& pattern : frontier) {
            Bits noisy = word;
            for (int p : pattern) noisy[p] ^= 1;
            const auto dec = code::decode(c, noisy);
            if (!dec || dec->message != message ||
                dec->errors_found != static_cast<int>(pattern.size()))
                return false;
            const auto nearest = oracle::brute_force_nearest(words, noisy);
            if (nearest.distance != pattern.size()) return false;
            const int start = pattern.empty() ? 0 : pattern.back() + 1;
            for (int p = start; p < c.n; ++p) {
                auto grown = pattern;
                grown.push_back(p);
                next.push_back(std::move(grown));
            }
        }
        frontier = std::move(next);
    }
    return true;
}

inline bool propagation_matches_oracle(Pauli error, const sv::CnotFn& cnot, Rng& rng) {
    // Independent path: the same round evaluated with dense matrices.
    const sv::StateVector chi = sv::random_qubit_state(rng);
    sv::StateVector fast = sv::tensor(sv::make_bell(sv::Bell::phi_plus), chi);
    oracle::Vec dense = fast.amps;

    const sv::CnotFn cx = cnot ? cnot : sv::CnotFn([](const sv::StateVector& s, int c,
                                                      int t) { return sv::apply_cnot(s, c, t); });
    fast = cx(fast, 0, 2);
    fast = sv::apply_pauli(fast, error, 2);
    fast = cx(fast, 1, 2);

    dense = oracle::matvec(oracle::dense_cnot(3, 0, 2), dense);
    dense = oracle::matvec(oracle::dense_pauli(3, 2, error), dense);
    dense = oracle::matvec(oracle::dense_cnot(3, 1, 2), dense);

    for (std::size_t i = 0; i < dense.size(); ++i)
        if (std::abs(dense[i] - fast.amps[i]) > 1e-10) return false;
    return true;
}

} // namespace verify_detail

inline VerifySummary verify_suite(std::ostream& os, const sv::CnotFn& cnot_override = {}) {
    using verify_detail::report;
    VerifySummary sum;
    Rng rng(0x5EED0001);  // fixed seed; the suite is deterministic

    os << std::left << std::setw(38) << "check" << std::setw(52) << "detail"
       << "result\n";
    os << std::string(96, '-') << "\n";

    // Bell-state constructions.
    {
        const double h = 1.0 / std::sqrt(2.0);
        const auto pp = sv::make_bell(sv::Bell::phi_plus);
        const auto pm = sv::make_bell(sv::Bell::phi_minus);
        const auto sm = sv::make_bell(sv::Bell::psi_minus);
        const bool ok = std::abs(pp.amps[0] - cplx(h, 0)) < 1e-12 &&
                        std::abs(pp.amps[3] - cplx(h, 0)) < 1e-12 &&
                        std::abs(pm.amps[3] - cplx(-h, 0)) < 1e-12 &&
                        std::abs(sm.amps[1] - cplx(h, 0)) < 1e-12 &&
                        std::abs(sm.amps[2] - cplx(-h, 0)) < 1e-12;
        report(os, sum, "bell-states", "amplitude tables for the four pair states", ok);
    }

    // Pauli composition table (mod phase) is the Klein four-group.
    {
        bool ok = true;
        const Pauli ps[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
        for (Pauli a : ps)
            for (Pauli b : ps) {
                const Pauli c = compose(a, b);
                ok = ok && compose(c, b) == a && compose(a, a) == Pauli::I;
            }
        ok = ok && compose(Pauli::X, Pauli::Z) == Pauli::Y &&
             compose(Pauli::Y, Pauli::Z) == Pauli::X &&
             compose(Pauli::X, Pauli::Y) == Pauli::Z;
        report(os, sum, "pauli-composition", "all 16 products, self-inverse", ok);
    }

    // CNOT against the dense oracle, plus involution.
    {
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            sv::StateVector s = sv::tensor(
                sv::tensor(sv::random_qubit_state(rng), sv::random_qubit_state(rng)),
                sv::random_qubit_state(rng));
            const auto fast = sv::apply_cnot(s, 0, 2);
            const auto dense = oracle::matvec(oracle::dense_cnot(3, 0, 2), s.amps);
            for (std::size_t i = 0; i < dense.size(); ++i)
                ok = ok && std::abs(dense[i] - fast.amps[i]) < 1e-12;
            const auto twice = sv::apply_cnot(fast, 0, 2);
            for (std::size_t i = 0; i < twice.dim(); ++i)
                ok = ok && std::abs(twice.amps[i] - s.amps[i]) < 1e-12;
        }
        report(os, sum, "cnot-oracle", "dense-matrix product and involution", ok);
    }

    // Error propagation through the encrypt/decrypt round: final state
    // factors as (residual on pair) x (residual on message).
    {
        struct Row {
            Pauli channel, pair, msg;
            const char* label;
        };
        const Row rows[] = {
            {Pauli::X, Pauli::I, Pauli::X, "bit-flip stays on the message"},
            {Pauli::Z, Pauli::Z, Pauli::Z, "phase-flip marks pair and message"},
            {Pauli::Y, Pauli::Z, Pauli::Y, "joint flip marks pair, Y on message"},
        };
        for (const Row& row : rows) {
            bool ok = true;
            for (int trial = 0; trial < 100 && ok; ++trial) {
                const auto res = sv::verify_propagation(row.channel, rng, cnot_override);
                ok = res.verified && res.pair_error == row.pair &&
                     res.message_error == row.msg;
                ok = ok && verify_detail::propagation_matches_oracle(
                               row.channel, cnot_override, rng);
            }
            std::string name = "propagation-";
            name += pauli_char(row.channel);
            report(os, sum, name, row.label, ok);
        }
    }

    // Intermediate states of the encrypting CNOT round.
    {
        bool ok = true;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            const sv::StateVector chi = sv::random_qubit_state(rng);
            const cplx a = chi.amps[0], b = chi.amps[1];
            const double h = 1.0 / std::sqrt(2.0);
            sv::StateVector state =
                sv::tensor(sv::make_bell(sv::Bell::phi_plus), chi);
            state = sv::apply_cnot(state, 0, 2);
            sv::StateVector expected{3, std::vector<cplx>(8, cplx(0, 0))};
            expected.amps[0] = h * a;  // |00>|chi>
            expected.amps[4] = h * b;
            expected.amps[3] = h * b;  // |11>(X chi)
            expected.amps[7] = h * a;
            ok = sv::equal_up_to_global_phase(state, expected, 1e-10);
            state = sv::apply_pauli(state, Pauli::Z, 2);
            expected.amps[4] = -h * b;
            expected.amps[7] = -h * a;
            ok = ok && sv::equal_up_to_global_phase(state, expected, 1e-10);
        }
        report(os, sum, "encrypting-cnot-intermediates",
               "post-CNOT and post-Z states match the written forms", ok);
    }

    // Frame model against the exact kernel on fixed and random circuits.
    {
        using namespace frame;
        bool ok = true;
        // One-time-pad round: Z prep, Z measurement, deterministic.
        CircuitDescription otp;
        otp.num_qubits = 1;
        otp.preps = {Prep{Basis::Z, 1}};
        otp.measurements = {{0, Basis::Z}};
        ok = ok && equivalence_check(otp, rng);
        // Y error read in the conjugate basis: uniform on both backends.
        CircuitDescription conj;
        conj.num_qubits = 1;
        conj.preps = {Prep{Basis::Z, 0}};
        conj.ops = {PauliErrOp{0, Pauli::Y}};
        conj.measurements = {{0, Basis::X}};
        ok = ok && equivalence_check(conj, rng);
        // Classicalized encrypted round with a phase flip in transit.
        CircuitDescription round;
        round.num_qubits = 2;
        round.preps = {Prep{Basis::Z, 1}, Prep{Basis::Z, 0}};  // key bit, cipher bit
        round.ops = {PauliErrOp{1, Pauli::Z}, CnotOp{0, 1}};
        round.measurements = {{1, Basis::Z}};
        ok = ok && equivalence_check(round, rng);
        report(os, sum, "frame-vs-statevec-fixed",
               "pad round, conjugate read, encrypted round", ok);

        for (int trial = 0; trial < 25 && ok; ++trial) {
            CircuitDescription c;
            c.num_qubits = 2;
            c.preps = {Prep{Basis::Z, rng.bit()}, Prep{Basis::Z, rng.bit()}};
            const int ops = static_cast<int>(rng.below(4));
            for (int i = 0; i < ops; ++i) {
                if (rng.bernoulli(0.5)) {
                    c.ops.push_back(PauliErrOp{static_cast<int>(rng.below(2)),
                                               static_cast<Pauli>(1 + rng.below(3))});
                } else {
                    const int ctl = static_cast<int>(rng.below(2));
                    c.ops.push_back(CnotOp{ctl, 1 - ctl});
                }
            }
            c.measurements = {{0, rng.bernoulli(0.5) ? Basis::Z : Basis::X},
                              {1, rng.bernoulli(0.5) ? Basis::Z : Basis::X}};
            ok = ok && equivalence_check(c, rng);
        }
        report(os, sum, "frame-vs-statevec-random",
               "25 random circuits from the supported gate set", ok);
    }

    // Entropy and block sizing.
    {
        bool ok = std::abs(code::binary_entropy(0.5) - 1.0) < 1e-12 &&
                  code::binary_entropy(0.0) == 0.0 && code::binary_entropy(1.0) == 0.0;
        for (int i = 0; i < 200 && ok; ++i) {
            const double x = rng.real53();
            ok = std::abs(code::binary_entropy(x) - code::binary_entropy(1.0 - x)) < 1e-12;
        }
        ok = ok && std::abs(code::binary_entropy(0.11) - 0.49993) < 1e-4;
        ok = ok && code::expanded_length(100, 0.11) == 200;
        ok = ok && code::expanded_length(100, 0.0) == 100;
        report(os, sum, "entropy-and-sizing",
               "H symmetry, H(0.11), expansion of 100 bits at 11%", ok);
    }

    // Coding oracles on the desk-scale code set.
    {
        struct Spec {
            int n, t;
        };
        const Spec specs[] = {{7, 1}, {7, 0}, {12, 1}, {15, 1}, {15, 2}, {15, 3}, {5, 2}, {16, 1}};
        bool ok = true;
        std::ostringstream names;
        for (const Spec& s : specs) {
            const code::LinearCode c = code::build_code_for(s.n, s.t);
            names << "[" << c.n << "," << c.k << "] ";
            ok = ok && c.n == s.n && c.t_correct >= s.t;
            for (const auto& grow : c.generator)
                for (const auto& hrow : c.parity_check) {
                    int acc = 0;
                    for (int j = 0; j < c.n; ++j) acc ^= grow[j] & hrow[j];
                    ok = ok && acc == 0;
                }
            // Every pattern of weight <= t decodes correctly; by linearity a
            // handful of codewords covers all of them.
            const auto words = oracle::enumerate_codewords(c.generator);
            for (int rep = 0; rep < 3 && ok; ++rep) {
                const Bits message = rng.bits(c.k);
                const Bits word = code::encode(c, message);
                ok = ok && verify_detail::all_weight_patterns_decode(c, words, message, word);
            }
        }
        report(os, sum, "code-oracles", names.str(), ok);
    }

    // Coset partition structure, exhaustive at small length.
    {
        const code::LinearCode c = code::build_code_for(7, 1);
        std::map<std::uint64_t, int> class_sizes;
        for (int w = 0; w < (1 << 7); ++w) {
            Bits word(7, 0);
            for (int j = 0; j < 7; ++j) word[j] = (w >> j) & 1;
            ++class_sizes[code::pack_syndrome(code::coset_index(c, word))];
        }
        bool ok = class_sizes.size() == (1u << (c.n - c.k));
        for (const auto& [syn, count] : class_sizes) ok = ok && count == (1 << c.k);
        report(os, sum, "coset-partition",
               "all 128 words split into 8 classes of 16", ok);
    }

    // Combinadic bijection.
    {
        bool ok = true;
        for (int n = 0; n <= 12 && ok; ++n) {
            const code::BinomialTable table(n);
            for (int k = 0; k <= n && ok; ++k) {
                const code::BigInt count = table.at(n, k);
                for (code::BigInt rank = 0; rank < count && ok; ++rank) {
                    const auto set = code::combinadic_unrank({n, k, rank}, table);
                    ok = code::combinadic_rank(n, set, table) == rank;
                }
            }
        }
        report(os, sum, "combinadic-bijection", "exhaustive for n <= 12", ok);
    }

    // Determinism: one faithful session replayed from the same seed.
    {
        proto::SessionConfig cfg;
        cfg.N = 16;
        const proto::SessionPlan plan = proto::SessionPlan::make(cfg);
        auto run_once = [&] {
            Rng r(1234);
            const Bits pool = r.bits(plan.M + plan.m_prime + 400);
            keys::SharedKeyStore alice(pool), bob(pool);
            adv::IdentityEve eve;
            Rng sr(777);
            const Bits msg = sr.bits(cfg.N);
            const auto t = proto::run_protocol3(alice, bob, msg, plan, {}, eve, sr);
            std::ostringstream os2;
            detail::write_csv_line(os2, t);
            detail::write_transcript_lines(os2, t);
            return os2.str();
        };
        report(os, sum, "determinism", "replayed session is byte-identical",
               run_once() == run_once());
    }

    os << std::string(96, '-') << "\n";
    os << "passed " << sum.passed << ", failed " << sum.failed << "\n";
    return sum;
}

} // namespace qkes::harness
