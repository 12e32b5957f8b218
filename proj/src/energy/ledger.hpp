#pragma once

#include <array>
#include <cstdint>

#include "core/sim_time.hpp"
#include "phy/reception.hpp"

namespace uwbsim {

// Per-pulse energies plus continuous per-state draws. Transmit and receive
// slots carry no continuous draw of their own: the pulse energies are the
// whole radio cost there, and the electronics baseline is the idle draw.
struct PowerProfile {
    double e_tx_pulse_j = 50e-12;
    double e_rx_pulse_j = 100e-12;
    double p_idle_w = 1e-3;
    double p_sense_w = 2e-3;
    double p_sleep_w = 1e-6;

    double state_draw_w(SlotState s) const {
        switch (s) {
            case SlotState::Idle: return p_idle_w;
            case SlotState::Sense: return p_sense_w;
            case SlotState::Sleep: return p_sleep_w;
            case SlotState::Transmit:
            case SlotState::Receive: return 0.0;
        }
        return 0.0;
    }
};

/// Per-node energy ledger: integer pulse counts and integer-tick state times,
/// so the total reconciles against the closed-form sum exactly.
class EnergyLedger {
public:
    void account_pulse_tx() { ++pulses_tx_; }
    void account_pulse_rx() { ++pulses_rx_; }

    /// Adds `duration` ticks of the given slot state. Intervals must tile the
    /// run; the caller owns that invariant.
    void account_state(SlotState state, SimTime duration);

    std::uint64_t pulses_tx() const { return pulses_tx_; }
    std::uint64_t pulses_rx() const { return pulses_rx_; }
    SimTime state_ticks(SlotState state) const {
        return state_ticks_[static_cast<std::size_t>(state)];
    }
    SimTime total_state_ticks() const;

    double total_joules(const PowerProfile& p) const;

private:
    std::uint64_t pulses_tx_ = 0;
    std::uint64_t pulses_rx_ = 0;
    std::array<SimTime, kSlotStateCount> state_ticks_{};
};

}  // namespace uwbsim
