#pragma once

#include <cassert>
#include <cmath>
#include <span>

namespace uwbsim {

/// Signal to interference-plus-noise ratio for a candidate pulse:
/// p_s / (sum of weaker concurrent pulses + F * P_n). The caller selects the
/// strongest pulse as the candidate; a stronger entry in `interferers` means
/// the capture selection upstream is broken.
inline double sinr(double p_s, std::span<const double> interferers, double noise_figure,
                   double noise_w) {
    assert(p_s > 0.0);
    double interference = 0.0;
    for (double p : interferers) {
        assert(p <= p_s);
        interference += p;
    }
    return p_s / (interference + noise_figure * noise_w);
}

inline double db_from_ratio(double r) { return 10.0 * std::log10(r); }
inline double ratio_from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace uwbsim
