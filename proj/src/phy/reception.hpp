#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/sim_time.hpp"
#include "phy/ber_table.hpp"

namespace uwbsim {

// Slot states of a transceiver. Exactly one state holds per slot: a node
// transmitting in its hop slot cannot receive in that slot, and a sleeping
// node does not listen at all.
enum class SlotState : std::uint8_t { Idle, Transmit, Sleep, Sense, Receive };
inline constexpr std::size_t kSlotStateCount = 5;

const char* to_string(SlotState s);

/// One pulse as seen by one receiver.
struct PulseArrival {
    SimTime at = 0;
    double power_w = 0.0;
    std::uint32_t source = 0;
    std::uint32_t tx = 0;     // transmission this pulse belongs to
    std::uint32_t bit = 0;    // bit position within the packet
    bool native = true;       // false for pulses bleeding in from the delay-spread tail
};

/// Lock-on state for one incoming packet. A receiver holds at most one
/// context per frame-relative slot; packets hopping on distinct slots are
/// received concurrently, which is what makes orthogonal hopping sequences
/// pay off.
struct ReceptionContext {
    std::uint32_t tx = 0;
    std::uint32_t source = 0;
    std::uint32_t expected_slot = 0;   // frame-relative slot the packet occupies
    std::int64_t first_abs_slot = 0;   // absolute slot of the first pulse
    SimTime lock_tick = 0;
    SimTime first_arrival = 0;
    double lock_power_w = 0.0;
    std::uint32_t l_pdu = 0;
    std::uint32_t bits_elapsed = 0;    // slot windows processed
    std::uint32_t pulses_received = 0;
    std::uint32_t bit_errors = 0;
};

struct WindowOutcome {
    SlotState state = SlotState::Sense;
    bool collision = false;      // two or more pulses shared the window
    bool decoded_bit = false;    // a bit was decided for the locked packet
    bool bit_error = false;
    bool outpowered = false;     // locked packet's pulse lost to a stronger one
    double sinr_db = 0.0;
};

/// Decides one closed slot window. `members` holds every pulse that landed in
/// the window; `ctx` is the context locked on this frame-relative slot, or
/// null. The candidate is the strongest native pulse (ties to the lower
/// source id); every other pulse in the window is summed as interference.
/// `draw` supplies one uniform [0,1) variate, consumed only when a bit is
/// actually decoded.
template <typename DrawFn>
WindowOutcome decide_window(ReceptionContext* ctx, std::span<const PulseArrival> members,
                            double sensitivity_w, double noise_figure, double noise_w,
                            const BerTable& table, DrawFn&& draw);

enum class PacketOutcome : std::uint8_t {
    Delivered,
    DroppedBitErrors,
    DroppedMissedPulses,
    DroppedForcedLoss,
};

const char* to_string(PacketOutcome o);

/// Deliver-or-drop decision once every slot window of the locked packet has
/// elapsed: delivered iff all pulses arrived and none was received in error.
PacketOutcome finalize_packet(const ReceptionContext& ctx, bool forced_loss);

// --- implementation ---

namespace detail {
const PulseArrival* strongest_native(std::span<const PulseArrival> members);
double interference_sum(std::span<const PulseArrival> members, const PulseArrival* candidate);
bool tail_dominates(std::span<const PulseArrival> members, const PulseArrival* candidate);
}  // namespace detail

template <typename DrawFn>
WindowOutcome decide_window(ReceptionContext* ctx, std::span<const PulseArrival> members,
                            double sensitivity_w, double noise_figure, double noise_w,
                            const BerTable& table, DrawFn&& draw) {
    WindowOutcome out;
    out.collision = members.size() >= 2;
    const PulseArrival* candidate = detail::strongest_native(members);

    if (ctx == nullptr) {
        // Nothing locked on this slot: signal is present but not decoded.
        out.state = SlotState::Sense;
        return out;
    }

    ctx->bits_elapsed += 1;
    out.state = SlotState::Receive;

    if (candidate == nullptr || candidate->tx != ctx->tx ||
        detail::tail_dominates(members, candidate)) {
        // The locked packet's pulse is missing or swamped by a stronger one;
        // the bit is lost outright.
        out.outpowered = candidate != nullptr;
        return out;
    }
    if (candidate->power_w < sensitivity_w) {
        out.state = SlotState::Sense;
        return out;
    }

    const double interference = detail::interference_sum(members, candidate);
    const double ratio = candidate->power_w / (interference + noise_figure * noise_w);
    out.sinr_db = 10.0 * std::log10(ratio);
    const double ber = table.lookup(out.sinr_db);
    out.decoded_bit = true;
    ctx->pulses_received += 1;
    if (ber > 0.0 && draw() < ber) {
        out.bit_error = true;
        ctx->bit_errors += 1;
    }
    return out;
}

}  // namespace uwbsim
