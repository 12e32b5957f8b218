#pragma once

#include <cstdint>

#include "core/sim_time.hpp"

namespace uwbsim {

// Frame/slot grid of the impulse radio. Every node shares the grid (nodes are
// frame-synchronized); each node owns one hop slot and transmits its single
// pulse per frame in that slot for the whole packet.
struct ThsConfig {
    SimTime slot_ticks = 0;
    SimTime frame_ticks = 0;
    std::uint32_t slots_per_frame = 0;
    std::uint32_t hop_slot = 0;  // this node's time-hopping value, in [0, slots_per_frame)
};

/// Slot index occupied at simulation time t: floor((t mod t_f) / t_s).
inline std::uint32_t current_slot(SimTime t, const ThsConfig& cfg) {
    return static_cast<std::uint32_t>((t % cfg.frame_ticks) / cfg.slot_ticks);
}

/// Absolute slot counter (slots tile the whole timeline).
inline std::int64_t absolute_slot(SimTime t, const ThsConfig& cfg) {
    return t / cfg.slot_ticks;
}

inline SimTime slot_start(std::int64_t absolute_slot, const ThsConfig& cfg) {
    return absolute_slot * cfg.slot_ticks;
}

/// Airtime of a packet: one pulse per frame, one bit per pulse.
/// Throws std::invalid_argument for an empty packet.
SimTime transmission_duration(std::uint32_t l_pdu_bits, const ThsConfig& cfg);

/// Earliest slot-aligned instant >= t that falls on this node's hop slot.
SimTime wait_for_slot(SimTime t, const ThsConfig& cfg);

/// Collision test for two frame-synchronized transmitters with length-1
/// hopping sequences, seen at a common receiver with per-link delays d1, d2.
/// The pulse trains collide iff their arrivals occupy the same frame-relative
/// slot; alignment is evaluated modulo the frame, so trains shifted by more
/// than a frame still collide with the neighbouring frame's pulses.
bool collision_predicate_length1(std::uint32_t ths1, std::uint32_t ths2, SimTime d1, SimTime d2,
                                 const ThsConfig& cfg);

/// Generalization to two arbitrary arrivals at one receiver. Each arrival
/// owns the half-open detection window [slot start, slot start + t_s +
/// spread); the pulses overlap iff either arrival falls inside the other's
/// window, comparing frame-relative positions.
bool pulses_overlap(SimTime a, SimTime b, const ThsConfig& cfg, SimTime spread_ticks = 0);

}  // namespace uwbsim
