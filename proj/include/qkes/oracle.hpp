#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qkes/bits.hpp"
#include "qkes/pauli.hpp"

namespace qkes::oracle {

// Independent reference implementations used to cross-check the fast paths:
// dense matrices applied by explicit matrix-vector products for the quantum
// kernel, and brute-force nearest-codeword search for the decoders. Nothing
// in here shares code with the implementations it checks.

using Vec = std::vector<cplx>;
using Mat = std::vector<std::vector<cplx>>;

inline Mat dense_identity(std::size_t dim) {
    Mat m(dim, std::vector<cplx>(dim, cplx(0, 0)));
    for (std::size_t i = 0; i < dim; ++i) m[i][i] = cplx(1, 0);
    return m;
}

// Single-qubit operator embedded at qubit q of an n-qubit register,
// little-endian indexing. Built entry-wise rather than by kron chains.
inline Mat dense_single_qubit(int n, int q, const std::array<cplx, 4>& u) {
    const std::size_t dim = 1ull << n;
    const std::uint64_t m = 1ull << q;
    Mat out(dim, std::vector<cplx>(dim, cplx(0, 0)));
    for (std::uint64_t row = 0; row < dim; ++row)
        for (std::uint64_t col = 0; col < dim; ++col) {
            if ((row & ~m) != (col & ~m)) continue;
            out[row][col] = u[((row & m) ? 2 : 0) + ((col & m) ? 1 : 0)];
        }
    return out;
}

inline Mat dense_pauli(int n, int q, Pauli p) {
    return dense_single_qubit(n, q, pauli_matrix(p));
}

inline Mat dense_cnot(int n, int control, int target) {
    const std::size_t dim = 1ull << n;
    const std::uint64_t cm = 1ull << control;
    const std::uint64_t tm = 1ull << target;
    Mat out(dim, std::vector<cplx>(dim, cplx(0, 0)));
    for (std::uint64_t col = 0; col < dim; ++col) {
        const std::uint64_t row = (col & cm) ? (col ^ tm) : col;
        out[row][col] = cplx(1, 0);
    }
    return out;
}

inline Vec matvec(const Mat& m, const Vec& v) {
    if (m.empty() || m[0].size() != v.size())
        throw std::invalid_argument("matvec: shape mismatch");
    Vec out(m.size(), cplx(0, 0));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            out[i] += m[i][j] * v[j];
    return out;
}

// ---- coding oracles ----

// All codewords spanned by the generator rows, enumerated by row subsets.
inline std::vector<Bits> enumerate_codewords(const std::vector<Bits>& generator_rows) {
    if (generator_rows.empty()) return {Bits{}};
    const std::size_t k = generator_rows.size();
    const std::size_t n = generator_rows[0].size();
    if (k > 20) throw std::invalid_argument("enumerate_codewords: too many rows");
    std::vector<Bits> words;
    words.reserve(1ull << k);
    for (std::uint64_t mask = 0; mask < (1ull << k); ++mask) {
        Bits w(n, 0);
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (1ull << i))
                for (std::size_t j = 0; j < n; ++j) w[j] ^= generator_rows[i][j];
        words.push_back(std::move(w));
    }
    return words;
}

inline std::size_t hamming_distance(const Bits& a, const Bits& b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

struct NearestCodeword {
    std::size_t index = 0;     // into the enumerated codeword list
    std::size_t distance = 0;
    bool unique = true;        // no other codeword at the same distance
};

inline NearestCodeword brute_force_nearest(const std::vector<Bits>& codewords,
                                           const Bits& received) {
    NearestCodeword best;
    best.distance = received.size() + 1;
    for (std::size_t i = 0; i < codewords.size(); ++i) {
        const std::size_t d = hamming_distance(codewords[i], received);
        if (d < best.distance) {
            best = {i, d, true};
        } else if (d == best.distance) {
            best.unique = false;
        }
    }
    return best;
}

} // namespace qkes::oracle
