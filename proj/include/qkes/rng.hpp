#pragma once

#include <cstdint>
#include <random>

#include "qkes/bits.hpp"

namespace qkes {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic random source. mt19937_64 output is pinned by the standard,
// and all derived quantities below avoid std::*_distribution (whose results
// are implementation-defined), so identical seeds give identical streams on
// every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), eng_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return eng_(); }

    int bit() { return static_cast<int>(next_u64() >> 63); }

    // Uniform double in [0, 1) with 53 random bits.
    double real53() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return real53() < p; }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % bound;
    }

    Bits bits(std::size_t n) {
        Bits out(n);
        for (auto& b : out) b = static_cast<std::uint8_t>(bit());
        return out;
    }

    // Independent stream derived from the original seed, not from consumed
    // state; session i always gets the same source for a given parent seed.
    Rng derive(std::uint64_t stream) const {
        return Rng(splitmix64(seed_ ^ (0xA5A5A5A5DEADBEEFULL + stream * 0x9E3779B97F4A7C15ULL)));
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

} // namespace qkes
