#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qkes/pauli.hpp"
#include "qkes/rng.hpp"
#include "qkes/statevec.hpp"

namespace qkes::frame {

enum class Origin : std::uint8_t { message, test };

// Transport record for one transmitted qubit. Exact for the circuit class
// the protocols use: basis-state preparations, classically controlled CNOTs,
// Pauli channels, and single Z/X measurements. Phases are tracked modulo
// global phase; no protocol observable depends on them.
struct QubitFrame {
    Basis prep_basis = Basis::Z;
    std::uint8_t prep_bit = 0;
    Pauli error = Pauli::I;
    Origin origin = Origin::message;
    int position = 0;
};

struct PauliChannelParams {
    double p_x = 0, p_y = 0, p_z = 0;

    void validate() const {
        if (p_x < 0 || p_y < 0 || p_z < 0 || p_x + p_y + p_z > 1.0)
            throw std::invalid_argument("PauliChannelParams: invalid probabilities");
    }
    bool noiseless() const { return p_x == 0 && p_y == 0 && p_z == 0; }
};

inline Pauli sample_pauli(const PauliChannelParams& ch, Rng& rng) {
    const double u = rng.real53();
    if (u < ch.p_x) return Pauli::X;
    if (u < ch.p_x + ch.p_y) return Pauli::Y;
    if (u < ch.p_x + ch.p_y + ch.p_z) return Pauli::Z;
    return Pauli::I;
}

// Each frame independently picks up I/X/Y/Z with the channel probabilities,
// composed onto whatever error it already carries.
inline std::vector<QubitFrame> transmit(std::vector<QubitFrame> frames,
                                        const PauliChannelParams& ch, Rng& rng) {
    ch.validate();
    for (auto& f : frames) f.error = compose(f.error, sample_pauli(ch, rng));
    return frames;
}

// Measurement of one frame. In the preparation basis the outcome is the
// prepared bit xor-ed with the error's visible component; in the conjugate
// basis the outcome is uniform. A frame is never measured twice by any
// protocol step.
inline int measure_frame(const QubitFrame& f, Basis basis, Rng& rng) {
    if (basis == f.prep_basis)
        return f.prep_bit ^ static_cast<int>(flips_outcome(f.error, basis));
    return rng.bit();
}

// ---- frame/state-vector equivalence ----

struct Prep {
    Basis basis = Basis::Z;
    int bit = 0;
};

struct PauliErrOp {
    int qubit = 0;
    Pauli p = Pauli::I;
};

struct CnotOp {
    int control = 0;
    int target = 0;
};

using CircuitOp = std::variant<PauliErrOp, CnotOp>;

struct CircuitDescription {
    int num_qubits = 0;
    std::vector<Prep> preps;
    std::vector<CircuitOp> ops;
    std::vector<std::pair<int, Basis>> measurements;  // distinct qubits
};

struct unsupported_circuit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One sampled run of the circuit on frames. CNOT is supported for Z-prepared
// frames, where its control acts classically; X-prepared controls are outside
// the supported class.
inline std::uint64_t run_circuit_frames(const CircuitDescription& c, Rng& rng) {
    std::vector<QubitFrame> frames(c.num_qubits);
    for (int q = 0; q < c.num_qubits; ++q) {
        frames[q].prep_basis = c.preps[q].basis;
        frames[q].prep_bit = static_cast<std::uint8_t>(c.preps[q].bit);
        frames[q].position = q;
    }
    for (const auto& op : c.ops) {
        if (std::holds_alternative<PauliErrOp>(op)) {
            const auto& e = std::get<PauliErrOp>(op);
            frames[e.qubit].error = compose(frames[e.qubit].error, e.p);
        } else {
            const auto& g = std::get<CnotOp>(op);
            QubitFrame& ctl = frames[g.control];
            QubitFrame& tgt = frames[g.target];
            if (ctl.prep_basis != Basis::Z || tgt.prep_basis != Basis::Z)
                throw unsupported_circuit("CNOT on non-Z-prepared frames");
            tgt.prep_bit ^= ctl.prep_bit;
            // X on the control copies to the target, Z on the target copies
            // back to the control.
            const bool tx = has_x_component(tgt.error) ^ has_x_component(ctl.error);
            const bool cz = has_z_component(ctl.error) ^ has_z_component(tgt.error);
            tgt.error = pauli_from_components(tx, has_z_component(tgt.error));
            ctl.error = pauli_from_components(has_x_component(ctl.error), cz);
        }
    }
    std::uint64_t outcome = 0;
    for (std::size_t j = 0; j < c.measurements.size(); ++j) {
        const auto& [q, basis] = c.measurements[j];
        outcome |= static_cast<std::uint64_t>(measure_frame(frames[q], basis, rng)) << j;
    }
    return outcome;
}

inline sv::StateVector run_circuit_statevec(const CircuitDescription& c) {
    if (c.num_qubits < 1 || c.num_qubits > sv::kMaxQubits)
        throw unsupported_circuit("state-vector backend limited to 8 qubits");
    sv::StateVector state =
        c.preps[0].basis == Basis::Z
            ? sv::make_basis_state(1, static_cast<std::uint64_t>(c.preps[0].bit))
            : sv::make_x_basis_state(c.preps[0].bit);
    for (int q = 1; q < c.num_qubits; ++q) {
        sv::StateVector next =
            c.preps[q].basis == Basis::Z
                ? sv::make_basis_state(1, static_cast<std::uint64_t>(c.preps[q].bit))
                : sv::make_x_basis_state(c.preps[q].bit);
        state = sv::tensor(state, next);
    }
    for (const auto& op : c.ops) {
        if (std::holds_alternative<PauliErrOp>(op)) {
            const auto& e = std::get<PauliErrOp>(op);
            state = sv::apply_pauli(state, e.p, e.qubit);
        } else {
            const auto& g = std::get<CnotOp>(op);
            state = sv::apply_cnot(state, g.control, g.target);
        }
    }
    return state;
}

// True iff the frame model's sampled outcome distribution matches the exact
// state-vector distribution within the given total-variation tolerance.
inline bool equivalence_check(const CircuitDescription& c, Rng& rng,
                              int samples = 10000, double tolerance = 0.02) {
    if (static_cast<int>(c.preps.size()) != c.num_qubits)
        throw std::invalid_argument("equivalence_check: prep list length mismatch");
    const sv::StateVector state = run_circuit_statevec(c);
    const std::vector<double> exact =
        sv::measurement_distribution(state, c.measurements);

    std::vector<double> empirical(exact.size(), 0.0);
    for (int i = 0; i < samples; ++i)
        empirical[run_circuit_frames(c, rng)] += 1.0 / samples;

    double tvd = 0;
    for (std::size_t i = 0; i < exact.size(); ++i)
        tvd += std::abs(exact[i] - empirical[i]);
    return tvd / 2 < tolerance;
}

} // namespace qkes::frame
