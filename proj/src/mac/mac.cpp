#include "mac/mac.hpp"

#include <string>

namespace uwbsim {

const char* to_string(MacProtocol p) {
    switch (p) {
        case MacProtocol::UnslottedTh: return "unslotted-th";
        case MacProtocol::SlottedTh: return "slotted-th";
        case MacProtocol::ReliableUnslottedTh: return "reliable-unslotted-th";
        case MacProtocol::ReliableSlottedTh: return "reliable-slotted-th";
    }
    return "?";
}

std::optional<MacProtocol> mac_protocol_from_string(const std::string& name) {
    if (name == "unslotted-th") return MacProtocol::UnslottedTh;
    if (name == "slotted-th") return MacProtocol::SlottedTh;
    if (name == "reliable-unslotted-th") return MacProtocol::ReliableUnslottedTh;
    if (name == "reliable-slotted-th") return MacProtocol::ReliableSlottedTh;
    return std::nullopt;
}

SimTime next_allocated_frame_start(SimTime t, const MacConfig& cfg,
                                   const std::vector<std::uint32_t>& frames) {
    const SimTime d = cfg.mac_frame_ticks;
    const std::int64_t cycle = cfg.allocation_cycle;
    // First MAC frame index whose start is >= t.
    std::int64_t index = (t + d - 1) / d;
    for (;;) {
        const std::int64_t within = index % cycle;
        bool allocated = false;
        for (std::uint32_t f : frames) {
            if (static_cast<std::int64_t>(f) == within) {
                allocated = true;
                break;
            }
        }
        if (allocated) return index * d;
        ++index;
    }
}

}  // namespace uwbsim
