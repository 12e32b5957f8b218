#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/sim_time.hpp"

namespace uwbsim {

// The four medium-access variants. None of them performs carrier sensing:
// time hopping already randomizes pulse positions, so the access decision
// only ever depends on the node's own clock and allocation.
enum class MacProtocol : std::uint8_t {
    UnslottedTh,
    SlottedTh,
    ReliableUnslottedTh,
    ReliableSlottedTh,
};

inline bool is_slotted(MacProtocol p) {
    return p == MacProtocol::SlottedTh || p == MacProtocol::ReliableSlottedTh;
}
inline bool is_reliable(MacProtocol p) {
    return p == MacProtocol::ReliableUnslottedTh || p == MacProtocol::ReliableSlottedTh;
}

const char* to_string(MacProtocol p);
std::optional<MacProtocol> mac_protocol_from_string(const std::string& name);

enum class PduKind : std::uint8_t { Data, Ack };

struct MacPdu {
    std::uint64_t uid = 0;
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint32_t seq = 0;  // per-(src,dst) sequence; for an ACK, the acked DATA seq
    PduKind kind = PduKind::Data;
    std::uint32_t flow = UINT32_MAX;  // traffic flow index, if any
    std::uint32_t payload_bits = 0;
    std::uint32_t l_pdu = 0;  // header + payload, bits on the air
    SimTime enqueue_tick = 0;
};

struct MacConfig {
    MacProtocol protocol = MacProtocol::UnslottedTh;
    std::uint32_t header_bits = 48;
    SimTime retransmission_delay = 0;  // 0 at load time = derive the default
    std::uint32_t retransmission_limit = 3;
    SimTime mac_frame_ticks = 0;  // Slotted variants only
    std::uint32_t allocation_cycle = 1;
    std::map<std::uint32_t, std::vector<std::uint32_t>> allocation;
    double forced_data_loss_p = 0.0;  // per-attempt loss injected at the receiver
    bool doze = false;                // sensors sleep whenever the MAC is idle
};

/// Start of the next MAC frame allocated to `frames` (indices within the
/// repeating allocation cycle), at or after t.
SimTime next_allocated_frame_start(SimTime t, const MacConfig& cfg,
                                   const std::vector<std::uint32_t>& frames);

/// Per-node MAC runtime state.
struct MacState {
    std::deque<std::uint32_t> queue;  // pdu indices; ACKs jump to the front
    // Outstanding DATA awaiting acknowledgment (reliable variants).
    std::optional<std::uint32_t> outstanding;
    std::uint32_t attempts = 0;
    std::uint64_t timeout_token = 0;
    bool frame_event_pending = false;
    std::map<std::uint32_t, std::int64_t> last_seq_from;  // duplicate suppression
};

}  // namespace uwbsim
