#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qkes {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

enum class Basis : std::uint8_t { Z = 0, X = 1 };

// Symplectic components: Y carries both an X and a Z part.
inline bool has_x_component(Pauli p) { return p == Pauli::X || p == Pauli::Y; }
inline bool has_z_component(Pauli p) { return p == Pauli::Z || p == Pauli::Y; }

inline Pauli pauli_from_components(bool x, bool z) {
    if (x && z) return Pauli::Y;
    if (x) return Pauli::X;
    if (z) return Pauli::Z;
    return Pauli::I;
}

// Group product modulo phase: {I,X,Y,Z} under composition is the Klein
// four-group once phases are discarded.
inline Pauli compose(Pauli a, Pauli b) {
    return pauli_from_components(has_x_component(a) ^ has_x_component(b),
                                 has_z_component(a) ^ has_z_component(b));
}

// A bit-flip is visible in a Z measurement, a phase-flip in an X
// measurement; Y flips both.
inline bool flips_outcome(Pauli error, Basis measurement) {
    return measurement == Basis::Z ? has_x_component(error) : has_z_component(error);
}

inline char pauli_char(Pauli p) {
    switch (p) {
        case Pauli::I: return 'I';
        case Pauli::X: return 'X';
        case Pauli::Y: return 'Y';
        case Pauli::Z: return 'Z';
    }
    return '?';
}

inline Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
    }
    throw std::invalid_argument(std::string("not a Pauli label: ") + c);
}

using cplx = std::complex<double>;

// Single-qubit matrices, row-major.
inline std::array<cplx, 4> pauli_matrix(Pauli p) {
    switch (p) {
        case Pauli::I: return {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(1, 0)};
        case Pauli::X: return {cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)};
        case Pauli::Y: return {cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0)};
        case Pauli::Z: return {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(-1, 0)};
    }
    throw std::logic_error("unreachable");
}

} // namespace qkes
