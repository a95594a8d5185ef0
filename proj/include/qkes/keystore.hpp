#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkes/bits.hpp"
#include "qkes/rng.hpp"

namespace qkes::keys {

enum class SliceStatus : std::uint8_t { active, consumed, recycled };
enum class Provenance : std::uint8_t { preshared, recycled_coset };

struct AllocationRecord {
    std::string label;
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    SliceStatus status = SliceStatus::active;
    Provenance provenance = Provenance::preshared;
};

struct key_exhaustion_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AccountingReport {
    std::uint64_t bits_consumed = 0;  // consumed slices plus the non-recycled part of recycled slices
    std::uint64_t bits_recycled = 0;  // coset bits appended back to the pool
    std::int64_t net_cost = 0;        // gross slice loss minus recycled gain
    std::uint64_t qubits_sent = 0;
};

// The pre-shared secret string G. Substrings are allocated left to right;
// consumed slices never become readable again; recycled coset bits are
// appended to the tail of the usable pool. Both parties hold one store each
// and, in a faithful run, every synchronized operation keeps the two
// bit-identical. A store is owned by one session loop at a time.
class SharedKeyStore {
public:
    SharedKeyStore() = default;
    explicit SharedKeyStore(Bits initial) : bits_(std::move(initial)) {}

    static SharedKeyStore random(std::size_t nbits, Rng& rng) {
        return SharedKeyStore(rng.bits(nbits));
    }

    std::uint64_t size() const { return bits_.size(); }
    std::uint64_t cursor() const { return cursor_; }
    std::uint64_t remaining() const { return bits_.size() - cursor_; }
    const std::vector<AllocationRecord>& ledger() const { return ledger_; }
    const Bits& raw_bits() const { return bits_; }

    bool identical_to(const SharedKeyStore& other) const {
        return bits_ == other.bits_ && cursor_ == other.cursor_;
    }

    std::size_t take(const std::string& label, std::uint64_t length) {
        if (remaining() < length)
            throw key_exhaustion_error("key store exhausted allocating " + label);
        AllocationRecord rec{label, cursor_, length, SliceStatus::active,
                             Provenance::preshared};
        cursor_ += length;
        ledger_.push_back(rec);
        return ledger_.size() - 1;
    }

    Bits read(std::size_t idx) const {
        const AllocationRecord& rec = checked(idx);
        if (rec.status == SliceStatus::consumed)
            throw std::logic_error("consumed slice is not readable: " + rec.label);
        return Bits(bits_.begin() + rec.offset, bits_.begin() + rec.offset + rec.length);
    }

    void consume(std::size_t idx) {
        AllocationRecord& rec = checked(idx);
        if (rec.status != SliceStatus::active)
            throw std::logic_error("slice already " + status_name(rec.status) +
                                   ": " + rec.label);
        rec.status = SliceStatus::consumed;
    }

    // Marks the slice recycled and appends its coset label to the pool.
    void recycle(std::size_t idx, const Bits& recycled_bits) {
        AllocationRecord& rec = checked(idx);
        if (rec.status != SliceStatus::active)
            throw std::logic_error("cannot recycle a slice already " +
                                   status_name(rec.status) + ": " + rec.label);
        rec.status = SliceStatus::recycled;
        recycled_from_ += rec.length;
        const std::uint64_t offset = bits_.size();
        bits_.insert(bits_.end(), recycled_bits.begin(), recycled_bits.end());
        ledger_.push_back(AllocationRecord{rec.label + ".coset", offset,
                                           recycled_bits.size(), SliceStatus::active,
                                           Provenance::recycled_coset});
        appended_ += recycled_bits.size();
    }

    void note_qubits_sent(std::uint64_t count) { qubits_sent_ += count; }

    AccountingReport accounting() const {
        AccountingReport rep;
        std::uint64_t consumed_slices = 0;
        for (const auto& rec : ledger_)
            if (rec.status == SliceStatus::consumed) consumed_slices += rec.length;
        rep.bits_recycled = appended_;
        rep.bits_consumed = consumed_slices + (recycled_from_ - appended_);
        rep.net_cost = static_cast<std::int64_t>(consumed_slices + recycled_from_) -
                       static_cast<std::int64_t>(appended_);
        rep.qubits_sent = qubits_sent_;
        return rep;
    }

    // ---- versioned binary layout ----
    // "QKES", u32 version, u64 bit length, packed bits (LSB-first within each
    // byte), u64 cursor, u64 qubits-sent counter, u64 recycled-from counter,
    // u64 appended counter, u32 record count, records as
    // {u16 label length, label bytes, u64 offset, u64 length, u8 status,
    //  u8 provenance}. All integers little-endian.
    std::vector<std::uint8_t> serialize() const {
        std::vector<std::uint8_t> out;
        auto put_u16 = [&](std::uint16_t v) {
            for (int i = 0; i < 2; ++i) out.push_back((v >> (8 * i)) & 0xff);
        };
        auto put_u32 = [&](std::uint32_t v) {
            for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
        };
        auto put_u64 = [&](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) out.push_back((v >> (8 * i)) & 0xff);
        };
        out.insert(out.end(), {'Q', 'K', 'E', 'S'});
        put_u32(kVersion);
        put_u64(bits_.size());
        const auto packed = pack_bits(bits_);
        out.insert(out.end(), packed.begin(), packed.end());
        put_u64(cursor_);
        put_u64(qubits_sent_);
        put_u64(recycled_from_);
        put_u64(appended_);
        put_u32(static_cast<std::uint32_t>(ledger_.size()));
        for (const auto& rec : ledger_) {
            put_u16(static_cast<std::uint16_t>(rec.label.size()));
            out.insert(out.end(), rec.label.begin(), rec.label.end());
            put_u64(rec.offset);
            put_u64(rec.length);
            out.push_back(static_cast<std::uint8_t>(rec.status));
            out.push_back(static_cast<std::uint8_t>(rec.provenance));
        }
        return out;
    }

    static SharedKeyStore deserialize(const std::vector<std::uint8_t>& data) {
        std::size_t pos = 0;
        auto need = [&](std::size_t n) {
            if (pos + n > data.size())
                throw std::invalid_argument("key store image truncated");
        };
        auto get_u16 = [&] {
            need(2);
            std::uint16_t v = 0;
            for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(data[pos++]) << (8 * i);
            return v;
        };
        auto get_u32 = [&] {
            need(4);
            std::uint32_t v = 0;
            for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos++]) << (8 * i);
            return v;
        };
        auto get_u64 = [&] {
            need(8);
            std::uint64_t v = 0;
            for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[pos++]) << (8 * i);
            return v;
        };
        need(4);
        if (data[0] != 'Q' || data[1] != 'K' || data[2] != 'E' || data[3] != 'S')
            throw std::invalid_argument("key store image has wrong magic");
        pos = 4;
        if (get_u32() != kVersion)
            throw std::invalid_argument("key store image has unsupported version");
        const std::uint64_t nbits = get_u64();
        const std::size_t nbytes = (nbits + 7) / 8;
        need(nbytes);
        std::vector<std::uint8_t> packed(data.begin() + pos, data.begin() + pos + nbytes);
        pos += nbytes;
        SharedKeyStore store(unpack_bits(packed, nbits));
        store.cursor_ = get_u64();
        store.qubits_sent_ = get_u64();
        store.recycled_from_ = get_u64();
        store.appended_ = get_u64();
        const std::uint32_t count = get_u32();
        for (std::uint32_t i = 0; i < count; ++i) {
            AllocationRecord rec;
            const std::uint16_t len = get_u16();
            need(len);
            rec.label.assign(data.begin() + pos, data.begin() + pos + len);
            pos += len;
            rec.offset = get_u64();
            rec.length = get_u64();
            need(2);
            rec.status = static_cast<SliceStatus>(data[pos++]);
            rec.provenance = static_cast<Provenance>(data[pos++]);
            store.ledger_.push_back(std::move(rec));
        }
        return store;
    }

private:
    static constexpr std::uint32_t kVersion = 1;

    static std::string status_name(SliceStatus s) {
        switch (s) {
            case SliceStatus::active: return "active";
            case SliceStatus::consumed: return "consumed";
            case SliceStatus::recycled: return "recycled";
        }
        return "?";
    }

    AllocationRecord& checked(std::size_t idx) {
        if (idx >= ledger_.size()) throw std::out_of_range("bad ledger index");
        return ledger_[idx];
    }
    const AllocationRecord& checked(std::size_t idx) const {
        if (idx >= ledger_.size()) throw std::out_of_range("bad ledger index");
        return ledger_[idx];
    }

    Bits bits_;
    std::uint64_t cursor_ = 0;
    std::vector<AllocationRecord> ledger_;
    std::uint64_t qubits_sent_ = 0;
    std::uint64_t recycled_from_ = 0;  // total length of slices marked recycled
    std::uint64_t appended_ = 0;       // total coset bits appended
};

// One session's worth of substrings, taken left to right: the pad b, the
// test-description string b', and the two authentication strings c and d.
struct SessionAllocation {
    Bits b, b_prime, c, d;
    std::size_t b_idx = 0, b_prime_idx = 0, c_idx = 0, d_idx = 0;
    int session_number = 0;
};

inline SessionAllocation allocate(SharedKeyStore& store, std::uint64_t M,
                                  std::uint64_t M_prime, std::uint64_t auth_len = 200,
                                  int session_number = 0) {
    if (store.remaining() < M + M_prime + 2 * auth_len)
        throw key_exhaustion_error("key store exhausted: need " +
                                   std::to_string(M + M_prime + 2 * auth_len) +
                                   " bits, have " + std::to_string(store.remaining()));
    const std::string tag = "s" + std::to_string(session_number) + ".";
    SessionAllocation a;
    a.session_number = session_number;
    a.b_idx = store.take(tag + "b", M);
    a.b_prime_idx = store.take(tag + "b'", M_prime);
    a.c_idx = store.take(tag + "c", auth_len);
    a.d_idx = store.take(tag + "d", auth_len);
    a.b = store.read(a.b_idx);
    a.b_prime = store.read(a.b_prime_idx);
    a.c = store.read(a.c_idx);
    a.d = store.read(a.d_idx);
    if (all_zero(a.d))
        throw std::runtime_error("degenerate allocation: d is all zero, abort "
                                 "replies would be indistinguishable");
    return a;
}

// Fresh b and c, with b' and d reused from a prior successful session
// (both remain active after success and may be shared across sessions).
inline SessionAllocation allocate_reusing(SharedKeyStore& store, std::uint64_t M,
                                          const SessionAllocation& prior,
                                          std::uint64_t auth_len = 200,
                                          int session_number = 0) {
    if (store.ledger()[prior.b_prime_idx].status != SliceStatus::active ||
        store.ledger()[prior.d_idx].status != SliceStatus::active)
        throw std::logic_error("allocate_reusing: prior b'/d no longer active");
    if (store.remaining() < M + auth_len)
        throw key_exhaustion_error("key store exhausted");
    const std::string tag = "s" + std::to_string(session_number) + ".";
    SessionAllocation a;
    a.session_number = session_number;
    a.b_idx = store.take(tag + "b", M);
    a.c_idx = store.take(tag + "c", auth_len);
    a.b_prime_idx = prior.b_prime_idx;
    a.d_idx = prior.d_idx;
    a.b = store.read(a.b_idx);
    a.b_prime = store.read(a.b_prime_idx);
    a.c = store.read(a.c_idx);
    a.d = store.read(a.d_idx);
    return a;
}

} // namespace qkes::keys
