#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

namespace uwbsim {

// Simulation clock. One tick is one picosecond, which leaves comfortable
// headroom below the nanosecond-scale slot timing so that sub-slot arrival
// offsets never alias, and an int64 still covers runs of months.
using SimTime = std::int64_t;

inline constexpr SimTime kTicksPerSecond = 1'000'000'000'000LL;
inline constexpr double kSecondsPerTick = 1e-12;

inline double seconds_from_ticks(SimTime t) {
    return static_cast<double>(t) * kSecondsPerTick;
}

// Nearest-tick rounding for derived quantities (propagation delays etc.).
inline SimTime round_ticks(double seconds) {
    return static_cast<SimTime>(std::llround(seconds * 1e12));
}

// Strict conversion for configured durations. Configuration values must land
// on an integer number of ticks; the slack term only absorbs the noise of the
// decimal-to-double round trip, so e.g. a slot of 1/3 ns is rejected.
inline std::optional<SimTime> ticks_from_seconds(double seconds) {
    if (!std::isfinite(seconds)) return std::nullopt;
    const double x = seconds * 1e12;
    const double r = std::round(x);
    if (std::fabs(x - r) > 0.01 + std::fabs(x) * 1e-12) return std::nullopt;
    if (std::fabs(r) > 9.0e18) return std::nullopt;
    return static_cast<SimTime>(r);
}

}  // namespace uwbsim
