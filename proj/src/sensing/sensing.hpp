#pragma once

#include <algorithm>
#include <cmath>

#include "channel/propagation.hpp"
#include "core/sim_time.hpp"

namespace uwbsim {

// The phenomenon under observation, modelled as a periodic wave broadcast.
// Seismic, acoustic and similar sources all reduce to this shape; what
// distinguishes them is the intensity, path loss exponent and (optionally)
// wave velocity.
struct Phenomenon {
    Position position;
    double source_intensity = 1.0;
    double sampling_rate_hz = 1.0;
    SimTime period_ticks = 0;
    double path_loss_exponent = 2.0;
    double reference_distance_m = 1.0;
    SimTime start = 0;
    SimTime stop = 0;
    double wave_velocity_mps = 0.0;  // 0 = samples arrive instantaneously
};

struct SensorDevice {
    double detection_threshold = 1e-6;
    double false_positive_rate = 0.0;
    double false_negative_rate = 0.0;
    double sampling_rate_hz = 1.0;
    SimTime period_ticks = 0;
};

/// Received intensity at distance d, with d clamped up to the reference
/// distance so a sensor sitting on top of the source sees the full intensity.
inline double received_intensity(const Phenomenon& ph, double distance_m) {
    const double d = std::max(distance_m, ph.reference_distance_m);
    return ph.source_intensity * std::pow(ph.reference_distance_m / d, ph.path_loss_exponent);
}

/// Threshold detector with per-sample false-positive / false-negative rates.
/// `u` is one uniform [0,1) variate.
inline bool sense(const SensorDevice& dev, double intensity, double u) {
    if (intensity >= dev.detection_threshold) {
        return !(u < dev.false_negative_rate);
    }
    return u < dev.false_positive_rate;
}

/// Whether the stochastic part of sense() needs a variate at all; callers use
/// this to leave the random stream untouched for ideal sensors.
inline bool sense_needs_draw(const SensorDevice& dev, double intensity) {
    return intensity >= dev.detection_threshold ? dev.false_negative_rate > 0.0
                                                : dev.false_positive_rate > 0.0;
}

}  // namespace uwbsim
