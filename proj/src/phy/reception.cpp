#include "phy/reception.hpp"

namespace uwbsim {

const char* to_string(SlotState s) {
    switch (s) {
        case SlotState::Idle: return "idle";
        case SlotState::Transmit: return "transmit";
        case SlotState::Sleep: return "sleep";
        case SlotState::Sense: return "sense";
        case SlotState::Receive: return "receive";
    }
    return "?";
}

const char* to_string(PacketOutcome o) {
    switch (o) {
        case PacketOutcome::Delivered: return "delivered";
        case PacketOutcome::DroppedBitErrors: return "bit-error";
        case PacketOutcome::DroppedMissedPulses: return "missed-pulses";
        case PacketOutcome::DroppedForcedLoss: return "forced-loss";
    }
    return "?";
}

PacketOutcome finalize_packet(const ReceptionContext& ctx, bool forced_loss) {
    if (forced_loss) return PacketOutcome::DroppedForcedLoss;
    if (ctx.pulses_received < ctx.l_pdu) return PacketOutcome::DroppedMissedPulses;
    if (ctx.bit_errors > 0) return PacketOutcome::DroppedBitErrors;
    return PacketOutcome::Delivered;
}

namespace detail {

const PulseArrival* strongest_native(std::span<const PulseArrival> members) {
    const PulseArrival* best = nullptr;
    for (const PulseArrival& p : members) {
        if (!p.native) continue;
        if (best == nullptr || p.power_w > best->power_w ||
            (p.power_w == best->power_w && p.source < best->source)) {
            best = &p;
        }
    }
    return best;
}

double interference_sum(std::span<const PulseArrival> members, const PulseArrival* candidate) {
    double sum = 0.0;
    for (const PulseArrival& p : members) {
        if (&p == candidate) continue;
        sum += p.power_w;
    }
    return sum;
}

bool tail_dominates(std::span<const PulseArrival> members, const PulseArrival* candidate) {
    for (const PulseArrival& p : members) {
        if (!p.native && p.power_w > candidate->power_w) return true;
    }
    return false;
}

}  // namespace detail

}  // namespace uwbsim
