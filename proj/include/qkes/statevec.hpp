#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qkes/pauli.hpp"
#include "qkes/rng.hpp"

namespace qkes::sv {

// Exact amplitude vector over up to 8 qubits. Index convention is
// little-endian: qubit q is bit q of the amplitude index. Operations are
// pure functions returning fresh values; nothing here mutates shared state.
struct StateVector {
    int num_qubits = 0;
    std::vector<cplx> amps;

    std::size_t dim() const { return amps.size(); }
};

inline constexpr int kMaxQubits = 8;

inline StateVector make_basis_state(int num_qubits, std::uint64_t index) {
    if (num_qubits < 1 || num_qubits > kMaxQubits)
        throw std::invalid_argument("make_basis_state: qubit count out of range");
    if (index >= (1ull << num_qubits))
        throw std::invalid_argument("make_basis_state: index out of range");
    StateVector s{num_qubits, std::vector<cplx>(1ull << num_qubits, cplx(0, 0))};
    s.amps[index] = cplx(1, 0);
    return s;
}

// |+> or |-> on one qubit; bit 0 -> |+>, bit 1 -> |->.
inline StateVector make_x_basis_state(int bit) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    StateVector s{1, {cplx(inv_sqrt2, 0), cplx(bit ? -inv_sqrt2 : inv_sqrt2, 0)}};
    return s;
}

enum class Bell { phi_plus, phi_minus, psi_plus, psi_minus };

inline StateVector make_bell(Bell kind) {
    const double h = 1.0 / std::sqrt(2.0);
    StateVector s{2, std::vector<cplx>(4, cplx(0, 0))};
    switch (kind) {
        case Bell::phi_plus:  s.amps[0] = h; s.amps[3] = h;  break;
        case Bell::phi_minus: s.amps[0] = h; s.amps[3] = -h; break;
        case Bell::psi_plus:  s.amps[1] = h; s.amps[2] = h;  break;
        case Bell::psi_minus: s.amps[1] = h; s.amps[2] = -h; break;
    }
    return s;
}

// Tensor product; `a` keeps the low qubit indices, `b` is placed above them.
inline StateVector tensor(const StateVector& a, const StateVector& b) {
    if (a.num_qubits + b.num_qubits > kMaxQubits)
        throw std::invalid_argument("tensor: qubit count out of range");
    StateVector out{a.num_qubits + b.num_qubits,
                    std::vector<cplx>(a.dim() * b.dim())};
    for (std::size_t j = 0; j < b.dim(); ++j)
        for (std::size_t i = 0; i < a.dim(); ++i)
            out.amps[(j << a.num_qubits) | i] = a.amps[i] * b.amps[j];
    return out;
}

inline double norm_squared(const StateVector& s) {
    double n = 0;
    for (const auto& a : s.amps) n += std::norm(a);
    return n;
}

inline void check_qubit(const StateVector& s, int q, const char* who) {
    if (q < 0 || q >= s.num_qubits)
        throw std::out_of_range(std::string(who) + ": qubit index out of range");
}

inline StateVector apply_cnot(const StateVector& s, int control, int target) {
    check_qubit(s, control, "apply_cnot");
    check_qubit(s, target, "apply_cnot");
    if (control == target)
        throw std::invalid_argument("apply_cnot: control equals target");
    StateVector out = s;
    const std::uint64_t cmask = 1ull << control;
    const std::uint64_t tmask = 1ull << target;
    for (std::uint64_t i = 0; i < s.dim(); ++i)
        if (i & cmask) out.amps[i ^ tmask] = s.amps[i];
    return out;
}

inline StateVector apply_pauli(const StateVector& s, Pauli p, int qubit) {
    check_qubit(s, qubit, "apply_pauli");
    StateVector out = s;
    const std::uint64_t m = 1ull << qubit;
    const auto mat = pauli_matrix(p);
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if (i & m) continue;
        const cplx a0 = s.amps[i];
        const cplx a1 = s.amps[i | m];
        out.amps[i]     = mat[0] * a0 + mat[1] * a1;
        out.amps[i | m] = mat[2] * a0 + mat[3] * a1;
    }
    return out;
}

// Unnormalized projection of `qubit` onto `outcome` in `basis`.
inline StateVector project(const StateVector& s, int qubit, Basis basis, int outcome) {
    check_qubit(s, qubit, "project");
    StateVector out = s;
    const std::uint64_t m = 1ull << qubit;
    if (basis == Basis::Z) {
        for (std::uint64_t i = 0; i < s.dim(); ++i)
            if (static_cast<int>((i & m) != 0) != outcome) out.amps[i] = cplx(0, 0);
    } else {
        // P = (I +/- X)/2 acting on the qubit; |+> maps to outcome 0.
        const double sign = outcome == 0 ? 1.0 : -1.0;
        for (std::uint64_t i = 0; i < s.dim(); ++i) {
            if (i & m) continue;
            const cplx a0 = s.amps[i];
            const cplx a1 = s.amps[i | m];
            out.amps[i]     = 0.5 * (a0 + sign * a1);
            out.amps[i | m] = 0.5 * (sign * a0 + a1);
        }
    }
    return out;
}

// Born-rule measurement; returns the outcome bit and the renormalized
// post-measurement state.
inline std::pair<int, StateVector> measure(const StateVector& s, int qubit,
                                           Basis basis, Rng& rng) {
    check_qubit(s, qubit, "measure");
    StateVector p0 = project(s, qubit, basis, 0);
    const double prob0 = norm_squared(p0);
    const int outcome = rng.bernoulli(prob0) ? 0 : 1;
    StateVector post = outcome == 0 ? std::move(p0) : project(s, qubit, basis, 1);
    const double n = std::sqrt(norm_squared(post));
    for (auto& a : post.amps) a /= n;
    return {outcome, post};
}

// Exact joint outcome distribution for single-shot measurements on distinct
// qubits. Outcome index packs measurement j into bit j.
inline std::vector<double> measurement_distribution(
    const StateVector& s, const std::vector<std::pair<int, Basis>>& measurements) {
    for (std::size_t i = 0; i < measurements.size(); ++i)
        for (std::size_t j = i + 1; j < measurements.size(); ++j)
            if (measurements[i].first == measurements[j].first)
                throw std::invalid_argument("measurement_distribution: repeated qubit");
    const std::size_t m = measurements.size();
    std::vector<double> probs(1ull << m, 0.0);
    for (std::uint64_t outcome = 0; outcome < probs.size(); ++outcome) {
        StateVector cur = s;
        for (std::size_t j = 0; j < m; ++j)
            cur = project(cur, measurements[j].first, measurements[j].second,
                          (outcome >> j) & 1);
        probs[outcome] = norm_squared(cur);
    }
    return probs;
}

// Phase-normalized form: the first amplitude with magnitude above tol is
// rotated to the positive real axis.
inline StateVector phase_normalized(const StateVector& s, double tol = 1e-12) {
    for (const auto& a : s.amps) {
        if (std::abs(a) > tol) {
            StateVector out = s;
            const cplx phase = a / std::abs(a);
            for (auto& x : out.amps) x /= phase;
            return out;
        }
    }
    return s;
}

inline bool equal_up_to_global_phase(const StateVector& a, const StateVector& b,
                                     double tol) {
    if (a.num_qubits != b.num_qubits) return false;
    const StateVector na = phase_normalized(a);
    const StateVector nb = phase_normalized(b);
    for (std::size_t i = 0; i < na.dim(); ++i)
        if (std::abs(na.amps[i] - nb.amps[i]) > tol) return false;
    return true;
}

// Random single-qubit state cos(theta)|0> + e^{i phi} sin(theta)|1>, with
// theta kept away from the poles so Pauli images of the state stay pairwise
// distinguishable at the verification tolerance.
inline StateVector random_qubit_state(Rng& rng) {
    const double margin = 0.05;
    const double theta = margin + rng.real53() * (std::numbers::pi / 2 - 2 * margin);
    const double phi = rng.real53() * 2 * std::numbers::pi;
    StateVector s{1, {cplx(std::cos(theta), 0),
                      std::polar(std::sin(theta), phi)}};
    return s;
}

using CnotFn = std::function<StateVector(const StateVector&, int, int)>;

struct PropagationResult {
    Pauli pair_error = Pauli::I;
    Pauli message_error = Pauli::I;
    bool verified = false;     // a clean product decomposition was found
    double deviation = 0.0;    // smallest distance to any candidate product
};

// Runs one encrypted-qubit round on the exact kernel: pair on qubits (0,1)
// with qubit 0 as the sender-side half, message on qubit 2. The sender's
// CNOT (control 0, target 2) is followed by `error` on the transiting
// qubit 2 and the receiver's CNOT (control 1, target 2). The final state is
// factored into (Pauli on the pair) x (Pauli on the message).
inline PropagationResult verify_propagation(Pauli error, Rng& rng,
                                            const CnotFn& cnot = {}) {
    if (error == Pauli::I)
        throw std::invalid_argument("verify_propagation: nothing to verify for I");
    const CnotFn& cx = cnot ? cnot : CnotFn(
        [](const StateVector& s, int c, int t) { return apply_cnot(s, c, t); });

    const StateVector chi = random_qubit_state(rng);
    StateVector h = tensor(make_bell(Bell::phi_plus), chi);
    h = cx(h, 0, 2);
    h = apply_pauli(h, error, 2);
    h = cx(h, 1, 2);

    PropagationResult result;
    result.deviation = 2.0;
    const Pauli paulis[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
    for (Pauli pp : paulis) {
        StateVector pair = apply_pauli(make_bell(Bell::phi_plus), pp, 0);
        for (Pauli mp : paulis) {
            StateVector candidate = tensor(pair, apply_pauli(chi, mp, 0));
            const StateVector da = phase_normalized(h);
            const StateVector db = phase_normalized(candidate);
            double dist = 0;
            for (std::size_t i = 0; i < da.dim(); ++i)
                dist = std::max(dist, std::abs(da.amps[i] - db.amps[i]));
            result.deviation = std::min(result.deviation, dist);
            if (!result.verified && dist <= 1e-10) {
                result.pair_error = pp;
                result.message_error = mp;
                result.verified = true;
            }
        }
    }
    return result;
}

} // namespace qkes::sv
