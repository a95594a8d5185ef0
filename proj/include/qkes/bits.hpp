#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qkes {

// One bit per element, value 0 or 1. Desk-scale strings; packing only
// happens at the serialization boundary.
using Bits = std::vector<std::uint8_t>;

inline Bits xor_bits(const Bits& a, const Bits& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("xor_bits: length mismatch");
    Bits out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

inline std::size_t hamming_weight(const Bits& a) {
    std::size_t w = 0;
    for (auto b : a) w += b;
    return w;
}

inline bool all_zero(const Bits& a) { return hamming_weight(a) == 0; }

inline std::string bits_to_string(const Bits& a) {
    std::string s;
    s.reserve(a.size());
    for (auto b : a) s.push_back(b ? '1' : '0');
    return s;
}

inline Bits bits_from_string(std::string_view s) {
    Bits out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '0') out.push_back(0);
        else if (c == '1') out.push_back(1);
        else throw std::invalid_argument("bits_from_string: expected 0/1");
    }
    return out;
}

// Packs LSB-first within each byte: bit i lands in byte i/8 at position i%8.
inline std::vector<std::uint8_t> pack_bits(const Bits& a) {
    std::vector<std::uint8_t> out((a.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i]) out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    return out;
}

inline Bits unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t nbits) {
    if (bytes.size() < (nbits + 7) / 8)
        throw std::invalid_argument("unpack_bits: buffer too short");
    Bits out(nbits);
    for (std::size_t i = 0; i < nbits; ++i)
        out[i] = (bytes[i / 8] >> (i % 8)) & 1u;
    return out;
}

// FNV-1a 64-bit, used for transcript payload digests.
inline std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t len) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t digest(const Bits& a) {
    auto packed = pack_bits(a);
    // Include the bit length so strings differing only by trailing zeros
    // hash differently.
    std::uint64_t h = fnv1a64(packed.data(), packed.size());
    std::uint64_t n = a.size();
    for (int i = 0; i < 8; ++i) {
        h ^= (n >> (8 * i)) & 0xff;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

} // namespace qkes
