#pragma once

#include <cmath>

#include "core/sim_time.hpp"

namespace uwbsim {

inline constexpr double kSpeedOfLight = 299'792'458.0;      // m/s
inline constexpr double kBoltzmann = 1.380649e-23;          // J/K

struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline double distance(const Position& a, const Position& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct ChannelConfig {
    double center_frequency_hz = 4e9;
    double bandwidth_hz = 500e6;
    double noise_temperature_k = 290.0;
    double path_loss_exponent = 2.0;
    double reference_distance_m = 1.0;
    double delay_spread_s = 0.0;
    // Pulse velocity as a fraction of c. 1.0 (free space) makes the
    // wavelength-times-frequency product come out to c exactly; the factor is
    // the hook for slower media.
    double velocity_factor = 1.0;
    double noise_figure = 1.0;  // linear, applied to thermal noise in the SINR
};

struct LinkBudget {
    double tx_power_w = 1e-3;
    double tx_gain = 1.0;
    double rx_gain = 1.0;
};

inline double wavelength_m(const ChannelConfig& cfg) {
    return cfg.velocity_factor * kSpeedOfLight / cfg.center_frequency_hz;
}

/// Pulse velocity, wavelength times center frequency.
inline double pulse_velocity(const ChannelConfig& cfg) {
    return wavelength_m(cfg) * cfg.center_frequency_hz;
}

/// Line-of-flight delay d / v, rounded to the nearest tick.
SimTime propagation_delay(double distance_m, const ChannelConfig& cfg);

/// Log-distance path loss anchored at the reference distance:
///   P_rx = P_tx * G_tx * G_rx * (lambda / 4 pi d0)^2 * (d0 / d)^n
/// Throws std::invalid_argument for d <= 0 (a pulse to self is not a link).
double received_power(const LinkBudget& budget, double distance_m, const ChannelConfig& cfg);

/// Thermal noise power k * T * W over the occupied bandwidth.
inline double noise_power(const ChannelConfig& cfg) {
    return kBoltzmann * cfg.noise_temperature_k * cfg.bandwidth_hz;
}

inline double watts_from_dbm(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double dbm_from_watts(double w) { return 10.0 * std::log10(w) + 30.0; }

}  // namespace uwbsim
