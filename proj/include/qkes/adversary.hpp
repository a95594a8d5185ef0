#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkes/bits.hpp"
#include "qkes/pauli_frame.hpp"
#include "qkes/rng.hpp"
#include "qkes/transcript.hpp"

namespace qkes::adv {

// Physical handle on one transiting qubit. An eavesdropper can observe the
// position in the sequence, measure (which collapses the carried state), or
// swap in a fresh preparation. The underlying preparation record is not
// readable, and nothing here can reach either party's key store.
class TransitQubit {
public:
    explicit TransitQubit(frame::QubitFrame* f) : f_(f) {}

    int position() const { return f_->position; }

    // Measure and collapse: afterwards the qubit is a fresh eigenstate of
    // the measured basis carrying the observed bit.
    int measure(Basis basis, Rng& rng) {
        const int outcome = frame::measure_frame(*f_, basis, rng);
        f_->prep_basis = basis;
        f_->prep_bit = static_cast<std::uint8_t>(outcome);
        f_->error = Pauli::I;
        return outcome;
    }

    void replace(Basis basis, int bit) {
        f_->prep_basis = basis;
        f_->prep_bit = static_cast<std::uint8_t>(bit);
        f_->error = Pauli::I;
    }

private:
    frame::QubitFrame* f_;
};

// Everything the adversary wrote down. Only observations made through the
// interposer interfaces land here.
struct EveView {
    std::vector<std::pair<int, int>> measured;  // (position, outcome)
    std::vector<Bits> classical;                // classical payload copies
    std::vector<int> announced_test_positions;  // from a public test reveal
    int sequence_length = 0;

    bool measured_position(int pos) const {
        for (const auto& [p, b] : measured)
            if (p == pos) return true;
        return false;
    }

    int bit_at(int pos) const {
        for (const auto& [p, b] : measured)
            if (p == pos) return b;
        return -1;
    }
};

class Eavesdropper {
public:
    virtual ~Eavesdropper() = default;

    virtual void on_quantum(std::vector<TransitQubit>& qubits, Rng& rng) {
        (void)qubits;
        (void)rng;
    }

    // Sees (and may replace) every classical message.
    virtual proto::ProtocolMessage on_classical(const proto::ProtocolMessage& msg,
                                                Rng& rng) {
        (void)rng;
        record_classical(msg);
        return msg;
    }

    const EveView& view() const { return view_; }

    // Declared audit view: the adversary's best per-bit estimate of the
    // message string, using only intercepted data plus public announcements.
    // Positions announced as tests are excluded; without an announcement the
    // first positions in transmission order are assumed to be the message.
    // Unknown bits are reported as -1.
    std::vector<int> message_estimate(int n_message_bits) const {
        std::vector<int> est(n_message_bits, -1);
        if (!view_.announced_test_positions.empty()) {
            const std::set<int> tests(view_.announced_test_positions.begin(),
                                      view_.announced_test_positions.end());
            int msg_index = 0;
            for (int pos = 0; pos < view_.sequence_length && msg_index < n_message_bits;
                 ++pos) {
                if (tests.count(pos)) continue;
                est[msg_index++] = view_.bit_at(pos);
            }
        } else {
            for (int i = 0; i < n_message_bits; ++i) est[i] = view_.bit_at(i);
        }
        return est;
    }

protected:
    void note_sequence(const std::vector<TransitQubit>& qubits) {
        view_.sequence_length =
            std::max(view_.sequence_length, static_cast<int>(qubits.size()));
    }

    void record_measurement(int pos, int bit) { view_.measured.emplace_back(pos, bit); }

    void record_classical(const proto::ProtocolMessage& msg) {
        if (msg.kind == proto::MessageKind::test_reveal) {
            view_.announced_test_positions = msg.reveal_positions;
        } else {
            view_.classical.push_back(msg.payload);
        }
    }

    EveView view_;
};

class IdentityEve : public Eavesdropper {};

// The single-qubit intercept-resend attack: measure one uniformly chosen
// qubit in Z and forward the observed eigenstate.
class InterceptOneZ : public Eavesdropper {
public:
    void on_quantum(std::vector<TransitQubit>& qubits, Rng& rng) override {
        note_sequence(qubits);
        if (qubits.empty()) return;
        auto& q = qubits[rng.below(qubits.size())];
        record_measurement(q.position(), q.measure(Basis::Z, rng));
    }
};

// Intercept-resend on each qubit independently with probability f.
class InterceptFraction : public Eavesdropper {
public:
    InterceptFraction(double fraction, Basis basis)
        : fraction_(fraction), basis_(basis) {
        if (fraction < 0.0 || fraction > 1.0)
            throw std::invalid_argument("InterceptFraction: fraction outside [0,1]");
    }

    void on_quantum(std::vector<TransitQubit>& qubits, Rng& rng) override {
        note_sequence(qubits);
        for (auto& q : qubits)
            if (rng.bernoulli(fraction_))
                record_measurement(q.position(), q.measure(basis_, rng));
    }

private:
    double fraction_;
    Basis basis_;
};

class MeasureAllZ : public Eavesdropper {
public:
    void on_quantum(std::vector<TransitQubit>& qubits, Rng& rng) override {
        note_sequence(qubits);
        for (auto& q : qubits)
            record_measurement(q.position(), q.measure(Basis::Z, rng));
    }
};

enum class ForgeMode : std::uint8_t { random, replay, flip };

// Tampers with the 200-bit protocol replies; the quantum sequence and any
// public reveal pass through untouched (but are recorded).
class ForgeClassical : public Eavesdropper {
public:
    explicit ForgeClassical(ForgeMode mode, Bits recorded = {})
        : mode_(mode), recorded_(std::move(recorded)) {}

    proto::ProtocolMessage on_classical(const proto::ProtocolMessage& msg,
                                        Rng& rng) override {
        record_classical(msg);
        if (msg.kind != proto::MessageKind::classical_ack &&
            msg.kind != proto::MessageKind::abort_notice)
            return msg;
        proto::ProtocolMessage forged = msg;
        switch (mode_) {
            case ForgeMode::random:
                forged.payload = rng.bits(msg.payload.size());
                break;
            case ForgeMode::replay:
                if (recorded_.size() == msg.payload.size()) forged.payload = recorded_;
                break;
            case ForgeMode::flip:
                if (!forged.payload.empty()) forged.payload[0] ^= 1;
                break;
        }
        return forged;
    }

private:
    ForgeMode mode_;
    Bits recorded_;
};

enum class AdversaryKind : std::uint8_t {
    identity,
    intercept_one_z,
    intercept_fraction,
    measure_all_z,
    forge_classical,
};

struct AdversarySpec {
    AdversaryKind kind = AdversaryKind::identity;
    double fraction = 1.0;
    Basis basis = Basis::Z;
    ForgeMode forge_mode = ForgeMode::random;
    Bits replay_payload;  // wired by the caller for replay forgeries
};

inline std::unique_ptr<Eavesdropper> make_eavesdropper(const AdversarySpec& spec) {
    switch (spec.kind) {
        case AdversaryKind::identity:
            return std::make_unique<IdentityEve>();
        case AdversaryKind::intercept_one_z:
            return std::make_unique<InterceptOneZ>();
        case AdversaryKind::intercept_fraction:
            return std::make_unique<InterceptFraction>(spec.fraction, spec.basis);
        case AdversaryKind::measure_all_z:
            return std::make_unique<MeasureAllZ>();
        case AdversaryKind::forge_classical:
            return std::make_unique<ForgeClassical>(spec.forge_mode, spec.replay_payload);
    }
    throw std::invalid_argument("make_eavesdropper: unknown kind");
}

inline AdversaryKind adversary_kind_from_name(const std::string& name) {
    if (name == "identity") return AdversaryKind::identity;
    if (name == "intercept_one_z") return AdversaryKind::intercept_one_z;
    if (name == "intercept_fraction") return AdversaryKind::intercept_fraction;
    if (name == "measure_all_z") return AdversaryKind::measure_all_z;
    if (name == "forge_classical") return AdversaryKind::forge_classical;
    throw std::invalid_argument("unknown adversary kind: " + name);
}

inline const char* adversary_kind_name(AdversaryKind k) {
    switch (k) {
        case AdversaryKind::identity: return "identity";
        case AdversaryKind::intercept_one_z: return "intercept_one_z";
        case AdversaryKind::intercept_fraction: return "intercept_fraction";
        case AdversaryKind::measure_all_z: return "measure_all_z";
        case AdversaryKind::forge_classical: return "forge_classical";
    }
    return "?";
}

} // namespace qkes::adv
