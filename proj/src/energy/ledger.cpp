#include "energy/ledger.hpp"

#include <stdexcept>

namespace uwbsim {

void EnergyLedger::account_state(SlotState state, SimTime duration) {
    if (duration < 0) throw std::logic_error("account_state: negative duration");
    state_ticks_[static_cast<std::size_t>(state)] += duration;
}

SimTime EnergyLedger::total_state_ticks() const {
    SimTime total = 0;
    for (SimTime t : state_ticks_) total += t;
    return total;
}

double EnergyLedger::total_joules(const PowerProfile& p) const {
    double total = static_cast<double>(pulses_tx_) * p.e_tx_pulse_j +
                   static_cast<double>(pulses_rx_) * p.e_rx_pulse_j;
    for (std::size_t i = 0; i < kSlotStateCount; ++i) {
        total += p.state_draw_w(static_cast<SlotState>(i)) *
                 seconds_from_ticks(state_ticks_[i]);
    }
    return total;
}

}  // namespace uwbsim
