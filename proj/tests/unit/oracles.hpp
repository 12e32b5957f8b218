#pragma once

#include <cstdint>
#include <vector>

#include "core/sim_time.hpp"
#include "phy/slots.hpp"

namespace testutil {

// Brute-force collision oracle: materialize both pulse trains as explicit
// absolute-time arrivals over `frames` frames each, attach to every pulse the
// half-open detection interval [slot start, slot start + t_s + spread), and
// test pairwise interval membership. No frame-relative arithmetic anywhere,
// so it checks the fast predicate's modulo reasoning.
inline bool trains_overlap_bruteforce(std::uint32_t ths1, std::uint32_t ths2, uwbsim::SimTime d1,
                                      uwbsim::SimTime d2, const uwbsim::ThsConfig& cfg,
                                      uwbsim::SimTime spread, int frames) {
    using uwbsim::SimTime;
    std::vector<SimTime> a, b;
    for (int k = 0; k < frames; ++k) {
        a.push_back(static_cast<SimTime>(k) * cfg.frame_ticks +
                    static_cast<SimTime>(ths1) * cfg.slot_ticks + d1);
        b.push_back(static_cast<SimTime>(k) * cfg.frame_ticks +
                    static_cast<SimTime>(ths2) * cfg.slot_ticks + d2);
    }
    const SimTime width = cfg.slot_ticks + spread;
    for (SimTime pa : a) {
        const SimTime wa = (pa / cfg.slot_ticks) * cfg.slot_ticks;
        for (SimTime pb : b) {
            const SimTime wb = (pb / cfg.slot_ticks) * cfg.slot_ticks;
            if ((pb >= wa && pb < wa + width) || (pa >= wb && pa < wb + width)) return true;
        }
    }
    return false;
}

// Direct slot-boundary enumeration: scan slot edges until the one containing
// the frame offset is found.
inline std::uint32_t current_slot_enumerated(uwbsim::SimTime t, const uwbsim::ThsConfig& cfg) {
    const uwbsim::SimTime offset = t % cfg.frame_ticks;
    std::uint32_t k = 0;
    while (!(static_cast<uwbsim::SimTime>(k) * cfg.slot_ticks <= offset &&
             offset < static_cast<uwbsim::SimTime>(k + 1) * cfg.slot_ticks)) {
        ++k;
    }
    return k;
}

}  // namespace testutil
