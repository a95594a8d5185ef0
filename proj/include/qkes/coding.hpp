#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qkes/bits.hpp"

namespace qkes::code {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Entropy and block sizing
// ---------------------------------------------------------------------------

/// Binary entropy H(x) = -x log2 x - (1-x) log2 (1-x), with H(0) = H(1) = 0.
inline double binary_entropy(double x) {
    if (x < 0.0 || x > 1.0)
        throw std::invalid_argument("binary_entropy: argument outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// Expanded block length M = ceil(N / (1 - H(t + delta))).
inline int expanded_length(int N, double t, double delta = 0.0) {
    if (N < 1) throw std::invalid_argument("expanded_length: N must be positive");
    const double rate = t + delta;
    if (rate < 0.0 || rate >= 0.5)
        throw std::invalid_argument("expanded_length: t + delta must lie in [0, 0.5)");
    const double denom = 1.0 - binary_entropy(rate);
    if (denom <= 0.0)
        throw std::invalid_argument("expanded_length: nonpositive rate denominator");
    return static_cast<int>(std::ceil(static_cast<double>(N) / denom - 1e-12));
}

// ---------------------------------------------------------------------------
// Binomial coefficients and combinadic (un)ranking, colexicographic order
// ---------------------------------------------------------------------------

class BinomialTable {
public:
    explicit BinomialTable(int max_n) : rows_(max_n + 1) {
        for (int n = 0; n <= max_n; ++n) {
            rows_[n].resize(n + 1);
            rows_[n][0] = 1;
            rows_[n][n] = 1;
            for (int k = 1; k < n; ++k)
                rows_[n][k] = rows_[n - 1][k - 1] + rows_[n - 1][k];
        }
    }

    const BigInt& at(int n, int k) const {
        static const BigInt zero = 0;
        if (k < 0 || k > n) return zero;
        return rows_[n][k];
    }

    int max_n() const { return static_cast<int>(rows_.size()) - 1; }

private:
    std::vector<std::vector<BigInt>> rows_;
};

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

struct CombinadicIndex {
    int n = 0;
    int k = 0;
    BigInt rank;
};

/// rank-th k-subset of [0, n) in colexicographic order, ascending positions.
inline std::vector<int> combinadic_unrank(const CombinadicIndex& idx,
                                          const BinomialTable& table) {
    if (idx.k < 0 || idx.k > idx.n)
        throw std::invalid_argument("combinadic_unrank: invalid subset size");
    if (idx.rank < 0 || idx.rank >= table.at(idx.n, idx.k))
        throw std::out_of_range("combinadic_unrank: rank out of range");
    std::vector<int> positions(idx.k);
    BigInt rank = idx.rank;
    int c = idx.n - 1;
    for (int i = idx.k; i >= 1; --i) {
        while (table.at(c, i) > rank) --c;
        positions[i - 1] = c;
        rank -= table.at(c, i);
    }
    return positions;
}

inline std::vector<int> combinadic_unrank(const CombinadicIndex& idx) {
    return combinadic_unrank(idx, BinomialTable(idx.n));
}

inline BigInt combinadic_rank(int n, const std::vector<int>& positions,
                              const BinomialTable& table) {
    BigInt rank = 0;
    int prev = -1;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] <= prev || positions[i] >= n)
            throw std::invalid_argument("combinadic_rank: positions must be "
                                        "strictly increasing within [0, n)");
        prev = positions[i];
        rank += table.at(positions[i], static_cast<int>(i) + 1);
    }
    return rank;
}

inline BigInt combinadic_rank(int n, const std::vector<int>& positions) {
    return combinadic_rank(n, positions, BinomialTable(n));
}

/// Bits needed to address values in [0, count); 0 when count <= 1.
inline int bits_for_count(const BigInt& count) {
    if (count <= 1) return 0;
    BigInt v = count - 1;
    int bits = 0;
    while (v > 0) {
        v >>= 1;
        ++bits;
    }
    return bits;
}

/// LSB-first integer value of a bit string.
inline BigInt bigint_from_bits(const Bits& bits) {
    BigInt v = 0;
    for (std::size_t i = bits.size(); i-- > 0;) {
        v <<= 1;
        v |= static_cast<int>(bits[i]);
    }
    return v;
}

// ---------------------------------------------------------------------------
// GF(2^m) arithmetic for the BCH family
// ---------------------------------------------------------------------------

class GaloisField {
public:
    explicit GaloisField(int m) : m_(m), n_((1 << m) - 1) {
        static const int primitive_poly[11] = {
            0,     0,     0x7,   0xB,   0x13,  0x25,
            0x43,  0x89,  0x11D, 0x211, 0x409};
        if (m < 2 || m > 10)
            throw std::invalid_argument("GaloisField: m must be in [2,10]");
        exp_.resize(2 * n_);
        log_.assign(n_ + 1, -1);
        int x = 1;
        for (int i = 0; i < n_; ++i) {
            exp_[i] = x;
            log_[x] = i;
            x <<= 1;
            if (x > n_) x ^= primitive_poly[m];
        }
        for (int i = n_; i < 2 * n_; ++i) exp_[i] = exp_[i - n_];
    }

    int m() const { return m_; }
    int order() const { return n_; }  // multiplicative order, 2^m - 1

    int mul(int a, int b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    int inv(int a) const {
        if (a == 0) throw std::domain_error("GaloisField: inverse of zero");
        return exp_[(n_ - log_[a]) % n_];
    }

    int alpha_pow(int e) const {
        e %= n_;
        if (e < 0) e += n_;
        return exp_[e];
    }

    int log_alpha(int a) const {
        if (a == 0) throw std::domain_error("GaloisField: log of zero");
        return log_[a];
    }

private:
    int m_, n_;
    std::vector<int> exp_;
    std::vector<int> log_;
};

// ---------------------------------------------------------------------------
// Linear block codes
// ---------------------------------------------------------------------------

enum class DecoderKind : std::uint8_t { identity, repetition, syndrome_table, bch };

struct DecodeResult {
    Bits message;
    int errors_found = 0;
};

/// Binary linear [n, k] code with a guaranteed correction radius. Generator
/// is systematic ([I_k | P]) so codewords carry the message as a prefix.
/// Values are immutable after construction; all member functions are const.
struct LinearCode {
    int n = 0;
    int k = 0;
    int t_correct = 0;
    std::vector<Bits> generator;     // k rows of length n
    std::vector<Bits> parity_check;  // (n - k) rows of length n
    DecoderKind decoder = DecoderKind::identity;

    // BCH context: the code is the cyclic BCH code of length 2^m - 1
    // shortened by `shortened_by` leading message coordinates.
    int gf_m = 0;
    int shortened_by = 0;

    // Coset-leader table for small codes, keyed by packed syndrome.
    std::map<std::uint64_t, Bits> coset_leaders;

    std::string family;  // "identity", "repetition", "bch"
};

inline Bits syndrome_of(const LinearCode& code, const Bits& word) {
    if (static_cast<int>(word.size()) != code.n)
        throw std::invalid_argument("syndrome: word length mismatch");
    Bits s(code.parity_check.size(), 0);
    for (std::size_t r = 0; r < code.parity_check.size(); ++r) {
        std::uint8_t acc = 0;
        const Bits& row = code.parity_check[r];
        for (int j = 0; j < code.n; ++j) acc ^= row[j] & word[j];
        s[r] = acc;
    }
    return s;
}

inline std::uint64_t pack_syndrome(const Bits& s) {
    if (s.size() > 63) throw std::invalid_argument("pack_syndrome: too long");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        v |= static_cast<std::uint64_t>(s[i]) << i;
    return v;
}

/// Codeword for a k-bit message: message * G over GF(2).
inline Bits encode(const LinearCode& code, const Bits& message) {
    if (static_cast<int>(message.size()) != code.k)
        throw std::invalid_argument("encode: message length mismatch");
    Bits word(code.n, 0);
    for (int i = 0; i < code.k; ++i)
        if (message[i])
            for (int j = 0; j < code.n; ++j) word[j] ^= code.generator[i][j];
    return word;
}

/// Coset label of `word` with respect to the code: parity_check * word.
/// Two words map to the same label iff they differ by a codeword.
inline Bits coset_index(const LinearCode& code, const Bits& word) {
    return syndrome_of(code, word);
}

namespace detail {

// Berlekamp-Massey error locator from syndromes S_1..S_2t (s[0] = S_1).
inline std::vector<int> berlekamp_massey(const GaloisField& gf,
                                         const std::vector<int>& s) {
    std::vector<int> sigma{1}, prev{1};
    int L = 0, shift = 1, prev_disc = 1;
    for (std::size_t nn = 0; nn < s.size(); ++nn) {
        int disc = s[nn];
        for (int i = 1; i <= L && i < static_cast<int>(sigma.size()); ++i)
            disc ^= gf.mul(sigma[i], s[nn - i]);
        if (disc == 0) {
            ++shift;
        } else if (2 * L <= static_cast<int>(nn)) {
            std::vector<int> old = sigma;
            const int scale = gf.mul(disc, gf.inv(prev_disc));
            if (sigma.size() < prev.size() + shift)
                sigma.resize(prev.size() + shift, 0);
            for (std::size_t i = 0; i < prev.size(); ++i)
                sigma[i + shift] ^= gf.mul(scale, prev[i]);
            L = static_cast<int>(nn) + 1 - L;
            prev = std::move(old);
            prev_disc = disc;
            shift = 1;
        } else {
            const int scale = gf.mul(disc, gf.inv(prev_disc));
            if (sigma.size() < prev.size() + shift)
                sigma.resize(prev.size() + shift, 0);
            for (std::size_t i = 0; i < prev.size(); ++i)
                sigma[i + shift] ^= gf.mul(scale, prev[i]);
            ++shift;
        }
    }
    while (!sigma.empty() && sigma.back() == 0) sigma.pop_back();
    return sigma;
}

inline std::optional<DecodeResult> decode_bch(const LinearCode& code,
                                              const Bits& received) {
    const GaloisField gf(code.gf_m);
    const int n_full = gf.order();
    const int two_t = 2 * code.t_correct;

    // Embed the shortened word: removed leading coordinates are zero.
    Bits full(n_full, 0);
    for (int i = 0; i < code.n; ++i) full[code.shortened_by + i] = received[i];

    std::vector<int> syndromes(two_t, 0);
    bool clean = true;
    for (int j = 1; j <= two_t; ++j) {
        int acc = 0;
        for (int i = 0; i < n_full; ++i)
            if (full[i]) acc ^= gf.alpha_pow((static_cast<long long>(i) * j) % n_full);
        syndromes[j - 1] = acc;
        clean = clean && acc == 0;
    }

    const int full_k = code.k + code.shortened_by;
    if (clean) {
        Bits msg(received.begin(), received.begin() + code.k);
        return DecodeResult{std::move(msg), 0};
    }

    const std::vector<int> sigma = berlekamp_massey(gf, syndromes);
    const int L = static_cast<int>(sigma.size()) - 1;
    if (L < 1 || L > code.t_correct) return std::nullopt;

    // Chien search: position i is in error iff sigma(alpha^{-i}) == 0.
    std::vector<int> error_positions;
    for (int i = 0; i < n_full; ++i) {
        int acc = 0;
        for (int d = 0; d <= L; ++d)
            acc ^= gf.mul(sigma[d], gf.alpha_pow((static_cast<long long>(n_full - i) * d) % n_full));
        if (acc == 0) error_positions.push_back(i);
    }
    if (static_cast<int>(error_positions.size()) != L) return std::nullopt;
    for (int pos : error_positions) {
        if (pos < code.shortened_by) return std::nullopt;  // outside the shortened word
        full[pos] ^= 1;
    }

    // Safety recheck: the corrected word must be a codeword.
    for (int j = 1; j <= two_t; ++j) {
        int acc = 0;
        for (int i = 0; i < n_full; ++i)
            if (full[i]) acc ^= gf.alpha_pow((static_cast<long long>(i) * j) % n_full);
        if (acc != 0) return std::nullopt;
    }

    Bits msg(full.begin() + code.shortened_by, full.begin() + full_k);
    return DecodeResult{std::move(msg), L};
}

} // namespace detail

/// Bounded-distance decoding. Returns the corrected message and the number
/// of errors removed, or nothing when no codeword lies within the correction
/// radius (the caller records a decode failure rather than trusting a
/// mis-decode).
inline std::optional<DecodeResult> decode(const LinearCode& code, const Bits& received) {
    if (static_cast<int>(received.size()) != code.n)
        throw std::invalid_argument("decode: word length mismatch");
    switch (code.decoder) {
        case DecoderKind::identity:
            return DecodeResult{received, 0};
        case DecoderKind::repetition: {
            const int ones = static_cast<int>(hamming_weight(received));
            const int zeros = code.n - ones;
            if (ones == zeros) return std::nullopt;
            return DecodeResult{Bits{static_cast<std::uint8_t>(ones > zeros)},
                                std::min(ones, zeros)};
        }
        case DecoderKind::syndrome_table: {
            const Bits s = syndrome_of(code, received);
            const auto it = code.coset_leaders.find(pack_syndrome(s));
            if (it == code.coset_leaders.end()) return std::nullopt;
            Bits corrected = xor_bits(received, it->second);
            Bits msg(corrected.begin(), corrected.begin() + code.k);
            return DecodeResult{std::move(msg),
                                static_cast<int>(hamming_weight(it->second))};
        }
        case DecoderKind::bch:
            return detail::decode_bch(code, received);
    }
    return std::nullopt;
}

namespace detail {

// Reduced row echelon form over GF(2); returns pivot columns.
inline std::vector<int> rref(std::vector<Bits>& rows) {
    std::vector<int> pivots;
    const int ncols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    std::size_t rank = 0;
    for (int col = 0; col < ncols && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && !rows[pivot][col]) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && rows[r][col])
                for (int j = 0; j < ncols; ++j) rows[r][j] ^= rows[rank][j];
        pivots.push_back(col);
        ++rank;
    }
    return pivots;
}

inline void build_parity_from_systematic(LinearCode& code) {
    // G = [I_k | P]  ->  H = [P^T | I_{n-k}]
    const int r = code.n - code.k;
    code.parity_check.assign(r, Bits(code.n, 0));
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < code.k; ++j)
            code.parity_check[i][j] = code.generator[j][code.k + i];
        code.parity_check[i][code.k + i] = 1;
    }
}

inline void build_coset_table(LinearCode& code) {
    code.coset_leaders.clear();
    code.coset_leaders[0] = Bits(code.n, 0);
    std::vector<std::vector<int>> frontier{{}};
    for (int w = 1; w <= code.t_correct; ++w) {
        std::vector<std::vector<int>> next;
        for (const auto& base : frontier) {
            const int start = base.empty() ? 0 : base.back() + 1;
            for (int p = start; p < code.n; ++p) {
                auto pattern = base;
                pattern.push_back(p);
                Bits e(code.n, 0);
                for (int q : pattern) e[q] = 1;
                const std::uint64_t s = pack_syndrome(syndrome_of(code, e));
                if (!code.coset_leaders.emplace(s, e).second)
                    throw std::logic_error(
                        "code construction: correctable patterns share a syndrome");
                next.push_back(std::move(pattern));
            }
        }
        frontier = std::move(next);
    }
}

} // namespace detail

/// BCH code of designed correction radius t over GF(2^m), shortened to
/// length n. Construction: generator polynomial = product of the minimal
/// polynomials of alpha^1..alpha^2t, systematized by row reduction.
inline LinearCode make_bch_code(int m, int t, int shortened_to = -1) {
    const GaloisField gf(m);
    const int n_full = gf.order();
    if (t < 1 || 2 * t > n_full)
        throw std::invalid_argument("make_bch_code: invalid correction radius");

    // Distinct cyclotomic cosets covering exponents 1..2t.
    std::vector<bool> covered(n_full, false);
    std::vector<int> g{1};  // generator polynomial over GF(2), ascending degree
    for (int i = 1; i <= 2 * t; ++i) {
        if (covered[i]) continue;
        // Minimal polynomial of alpha^i: product over the coset of (x - alpha^j).
        std::vector<int> mp{1};
        int j = i;
        do {
            covered[j] = true;
            std::vector<int> nxt(mp.size() + 1, 0);
            const int root = gf.alpha_pow(j);
            for (std::size_t d = 0; d < mp.size(); ++d) {
                nxt[d + 1] ^= mp[d];
                nxt[d] ^= gf.mul(mp[d], root);
            }
            mp = std::move(nxt);
            j = (2 * j) % n_full;
        } while (j != i);
        for (int coeff : mp)
            if (coeff != 0 && coeff != 1)
                throw std::logic_error("make_bch_code: minimal polynomial not binary");
        std::vector<int> prod(g.size() + mp.size() - 1, 0);
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = 0; b < mp.size(); ++b)
                prod[a + b] ^= g[a] & mp[b];
        g = std::move(prod);
    }

    const int deg = static_cast<int>(g.size()) - 1;
    const int k_full = n_full - deg;
    if (k_full < 1)
        throw std::invalid_argument("make_bch_code: no information bits at this radius");

    const int n = shortened_to < 0 ? n_full : shortened_to;
    if (n > n_full || k_full - (n_full - n) < 1)
        throw std::invalid_argument("make_bch_code: cannot shorten to requested length");
    const int s = n_full - n;

    // Rows x^i * g(x) for i = 0..k_full-1, then RREF to [I | P].
    std::vector<Bits> rows(k_full, Bits(n_full, 0));
    for (int i = 0; i < k_full; ++i)
        for (int d = 0; d <= deg; ++d) rows[i][i + d] = static_cast<std::uint8_t>(g[d]);
    const auto pivots = detail::rref(rows);
    if (static_cast<int>(pivots.size()) != k_full)
        throw std::logic_error("make_bch_code: generator rows not independent");
    for (int i = 0; i < k_full; ++i)
        if (pivots[i] != i)
            throw std::logic_error("make_bch_code: expected leading systematic form");

    LinearCode code;
    code.n = n;
    code.k = k_full - s;
    code.t_correct = t;
    code.decoder = DecoderKind::bch;
    code.gf_m = m;
    code.shortened_by = s;
    code.family = "bch";
    code.generator.assign(code.k, Bits(n, 0));
    for (int i = 0; i < code.k; ++i)
        for (int j = 0; j < n; ++j) code.generator[i][j] = rows[s + i][s + j];
    detail::build_parity_from_systematic(code);
    if (code.n <= 24 && code.n - code.k <= 24) {
        code.decoder = DecoderKind::syndrome_table;
        detail::build_coset_table(code);
    }
    return code;
}

inline LinearCode make_identity_code(int n) {
    LinearCode code;
    code.n = n;
    code.k = n;
    code.t_correct = 0;
    code.decoder = DecoderKind::identity;
    code.family = "identity";
    code.generator.assign(n, Bits(n, 0));
    for (int i = 0; i < n; ++i) code.generator[i][i] = 1;
    return code;
}

inline LinearCode make_repetition_code(int n) {
    if (n < 1 || n % 2 == 0)
        throw std::invalid_argument("make_repetition_code: length must be odd");
    LinearCode code;
    code.n = n;
    code.k = 1;
    code.t_correct = (n - 1) / 2;
    code.decoder = DecoderKind::repetition;
    code.family = "repetition";
    code.generator.assign(1, Bits(n, 1));
    code.parity_check.assign(n - 1, Bits(n, 0));
    for (int i = 0; i < n - 1; ++i) {
        code.parity_check[i][i] = 1;
        code.parity_check[i][i + 1] = 1;
    }
    return code;
}

/// Code of length exactly M correcting at least t_errors: the BCH family,
/// with identity and repetition covering the degenerate ends. Throws when
/// the family has no code of positive dimension at this length and radius.
inline LinearCode build_code_for(int M, int t_errors) {
    if (M < 1) throw std::invalid_argument("build_code_for: invalid length");
    if (t_errors < 0) throw std::invalid_argument("build_code_for: invalid radius");
    if (t_errors == 0) return make_identity_code(M);
    for (int m = 2; m <= 10; ++m) {
        const int n_full = (1 << m) - 1;
        if (n_full < M || 2 * t_errors > n_full) continue;
        try {
            return make_bch_code(m, t_errors, M);
        } catch (const std::invalid_argument&) {
            continue;  // not enough information bits after shortening
        }
    }
    if (M % 2 == 1 && (M - 1) / 2 >= t_errors) return make_repetition_code(M);
    throw std::invalid_argument("build_code_for: no code of length " +
                                std::to_string(M) + " correcting " +
                                std::to_string(t_errors) + " errors");
}

/// Strongest code of length M with dimension at least min_k: scans the
/// family upward in correction radius and keeps the last feasible code.
/// Falls back to the identity code when even one corrected error would
/// drop the dimension below min_k.
inline LinearCode best_code_for_rate(int M, int min_k, int t_target) {
    if (min_k > M)
        throw std::invalid_argument("best_code_for_rate: dimension exceeds length");
    LinearCode best = make_identity_code(M);
    for (int t = 1; t <= t_target; ++t) {
        LinearCode candidate;
        try {
            candidate = build_code_for(M, t);
        } catch (const std::invalid_argument&) {
            break;
        }
        if (candidate.k < min_k) break;
        best = std::move(candidate);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Textual fixture format: header line, then generator and parity rows
// ---------------------------------------------------------------------------

inline std::string to_text(const LinearCode& code) {
    std::ostringstream os;
    os << "n=" << code.n << " k=" << code.k << " t=" << code.t_correct
       << " family=" << code.family << " gf_m=" << code.gf_m
       << " shortened_by=" << code.shortened_by << "\n";
    os << "G:\n";
    for (const auto& row : code.generator) os << bits_to_string(row) << "\n";
    os << "H:\n";
    for (const auto& row : code.parity_check) os << bits_to_string(row) << "\n";
    return os.str();
}

inline LinearCode from_text(const std::string& text) {
    std::istringstream is(text);
    std::string header;
    std::getline(is, header);
    LinearCode code;
    auto field = [&](const std::string& key) -> std::string {
        const auto pos = header.find(key + "=");
        if (pos == std::string::npos)
            throw std::invalid_argument("from_text: missing field " + key);
        const auto start = pos + key.size() + 1;
        const auto end = header.find(' ', start);
        return header.substr(start, end == std::string::npos ? end : end - start);
    };
    code.n = std::stoi(field("n"));
    code.k = std::stoi(field("k"));
    code.t_correct = std::stoi(field("t"));
    code.family = field("family");
    code.gf_m = std::stoi(field("gf_m"));
    code.shortened_by = std::stoi(field("shortened_by"));
    std::string line;
    std::getline(is, line);
    if (line != "G:") throw std::invalid_argument("from_text: expected G: section");
    for (int i = 0; i < code.k; ++i) {
        std::getline(is, line);
        code.generator.push_back(bits_from_string(line));
    }
    std::getline(is, line);
    if (line != "H:") throw std::invalid_argument("from_text: expected H: section");
    for (int i = 0; i < code.n - code.k; ++i) {
        std::getline(is, line);
        code.parity_check.push_back(bits_from_string(line));
    }
    if (code.family == "identity") code.decoder = DecoderKind::identity;
    else if (code.family == "repetition") code.decoder = DecoderKind::repetition;
    else code.decoder = DecoderKind::bch;
    if (code.decoder == DecoderKind::bch && code.n <= 24 && code.n - code.k <= 24) {
        code.decoder = DecoderKind::syndrome_table;
        detail::build_coset_table(code);
    }
    return code;
}

} // namespace qkes::code
