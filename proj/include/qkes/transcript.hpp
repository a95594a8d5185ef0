#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkes/bits.hpp"
#include "qkes/pauli.hpp"
#include "qkes/pauli_frame.hpp"

namespace qkes::proto {

enum class ProtocolKind : std::uint8_t { p1, p2, p3, naive_baseline };

enum class Outcome : std::uint8_t {
    delivered,
    aborted_by_bob,
    aborted_by_alice,
    decode_failure,
};

enum class Party : std::uint8_t { alice, bob };

enum class MessageKind : std::uint8_t {
    quantum_sequence,
    classical_ack,   // the continue reply (c)
    abort_notice,    // the abort reply (c xor d)
    test_reveal,     // naive baseline only: public test announcement
};

struct ProtocolMessage {
    MessageKind kind = MessageKind::classical_ack;
    Party sender = Party::alice;
    std::vector<frame::QubitFrame> frames;   // quantum_sequence
    Bits payload;                            // classical replies
    // test_reveal payload
    std::vector<int> reveal_positions;
    std::vector<Basis> reveal_bases;
    Bits reveal_values;
};

struct TranscriptEvent {
    int step = 0;
    std::string dir;   // "A->B", "B->A", "local"
    std::string kind;
    std::uint64_t bit_count = 0;
    std::uint64_t payload_digest = 0;
    std::string note;
};

inline const char* protocol_name(ProtocolKind p) {
    switch (p) {
        case ProtocolKind::p1: return "p1";
        case ProtocolKind::p2: return "p2";
        case ProtocolKind::p3: return "p3";
        case ProtocolKind::naive_baseline: return "naive_baseline";
    }
    return "?";
}

inline const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::delivered: return "delivered";
        case Outcome::aborted_by_bob: return "aborted_by_bob";
        case Outcome::aborted_by_alice: return "aborted_by_alice";
        case Outcome::decode_failure: return "decode_failure";
    }
    return "?";
}

// Ordered record of everything one session did: messages (as digests),
// measured rates, outcome, and per-session key accounting.
struct SessionTranscript {
    std::uint64_t session_id = 0;
    ProtocolKind protocol = ProtocolKind::p3;
    std::vector<TranscriptEvent> events;

    bool rates_measured = false;
    double t_x0 = 0.0;
    double t_z0 = 0.0;

    Outcome outcome = Outcome::delivered;
    Bits decoded;                 // receiver output; quarantined on a sender-side abort
    Bits recycled;                // agreed recycled string; empty unless delivered
    int decode_errors_corrected = 0;

    std::uint64_t qubits_sent = 0;
    std::uint64_t bits_consumed = 0;   // sender-side delta for this session
    std::uint64_t bits_recycled = 0;
    int eve_bits_learned = 0;          // plaintext message bits exposed to the adversary

    // Simulator-side diagnostics (not derivable by the parties in general).
    int realized_message_error_weight = 0;
    bool naive_message_hit = false;
    bool naive_detected = false;
    std::vector<Pauli> pair_residuals;  // protocol 2: residual on each pair
};

} // namespace qkes::proto
