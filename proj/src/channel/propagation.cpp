#include "channel/propagation.hpp"

#include <stdexcept>

namespace uwbsim {

SimTime propagation_delay(double distance_m, const ChannelConfig& cfg) {
    if (distance_m < 0.0) throw std::invalid_argument("propagation_delay: negative distance");
    return round_ticks(distance_m / pulse_velocity(cfg));
}

double received_power(const LinkBudget& budget, double distance_m, const ChannelConfig& cfg) {
    if (distance_m <= 0.0) {
        throw std::invalid_argument("received_power: distance must be positive");
    }
    const double lambda = wavelength_m(cfg);
    const double d0 = cfg.reference_distance_m;
    const double at_reference = lambda / (4.0 * M_PI * d0);
    return budget.tx_power_w * budget.tx_gain * budget.rx_gain * at_reference * at_reference *
           std::pow(d0 / distance_m, cfg.path_loss_exponent);
}

}  // namespace uwbsim
