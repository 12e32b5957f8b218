#include "phy/slots.hpp"

#include <stdexcept>

namespace uwbsim {

namespace {

SimTime floor_mod(SimTime x, SimTime m) {
    SimTime r = x % m;
    return r < 0 ? r + m : r;
}

}  // namespace

SimTime transmission_duration(std::uint32_t l_pdu_bits, const ThsConfig& cfg) {
    if (l_pdu_bits == 0) throw std::invalid_argument("transmission_duration: empty packet");
    return static_cast<SimTime>(l_pdu_bits) * cfg.frame_ticks;
}

SimTime wait_for_slot(SimTime t, const ThsConfig& cfg) {
    const SimTime frame_start = (t / cfg.frame_ticks) * cfg.frame_ticks;
    const SimTime candidate = frame_start + static_cast<SimTime>(cfg.hop_slot) * cfg.slot_ticks;
    return candidate >= t ? candidate : candidate + cfg.frame_ticks;
}

bool collision_predicate_length1(std::uint32_t ths1, std::uint32_t ths2, SimTime d1, SimTime d2,
                                 const ThsConfig& cfg) {
    const SimTime p1 = floor_mod(static_cast<SimTime>(ths1) * cfg.slot_ticks + d1, cfg.frame_ticks);
    const SimTime p2 = floor_mod(static_cast<SimTime>(ths2) * cfg.slot_ticks + d2, cfg.frame_ticks);
    return p1 / cfg.slot_ticks == p2 / cfg.slot_ticks;
}

bool pulses_overlap(SimTime a, SimTime b, const ThsConfig& cfg, SimTime spread_ticks) {
    const SimTime width = cfg.slot_ticks + spread_ticks;
    const SimTime ra = floor_mod(a, cfg.frame_ticks);
    const SimTime rb = floor_mod(b, cfg.frame_ticks);
    const SimTime wa = (ra / cfg.slot_ticks) * cfg.slot_ticks;
    const SimTime wb = (rb / cfg.slot_ticks) * cfg.slot_ticks;
    return floor_mod(rb - wa, cfg.frame_ticks) < width ||
           floor_mod(ra - wb, cfg.frame_ticks) < width;
}

}  // namespace uwbsim
