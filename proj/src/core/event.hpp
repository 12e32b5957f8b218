#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include "core/sim_time.hpp"

namespace uwbsim {

enum class Layer : std::uint8_t { Kernel, Phy, Mac, Sensor, App };

// Event payloads are small PODs dispatched by the owning simulation; the
// kernel itself never inspects them. Action wraps an arbitrary callback for
// one-off timers and tests.
struct EvPulseTx {
    std::uint32_t tx;
    std::uint32_t bit;
};
struct EvPulseArrive {
    std::uint32_t tx;
    std::uint32_t rx;
    std::uint32_t bit;
};
struct EvWindowClose {
    std::uint32_t rx;
    std::int64_t slot;
};
struct EvMacHandoff {
    std::uint32_t tx;
    std::uint32_t rx;
};
struct EvTxComplete {
    std::uint32_t node;
    std::uint32_t tx;
};
struct EvAckTimeout {
    std::uint32_t node;
    std::uint64_t token;
};
struct EvMacFrame {
    std::uint32_t node;
};
struct EvTraffic {
    std::uint32_t flow;
};
struct EvPhenomenonEmit {
    std::uint32_t phenomenon;
};
struct EvSenseArrive {
    std::uint32_t node;
    double intensity;
};
struct EvSensorSample {
    std::uint32_t node;
};
struct EvAction {
    std::function<void()> fn;
};

using EventPayload =
    std::variant<EvPulseTx, EvPulseArrive, EvWindowClose, EvMacHandoff, EvTxComplete, EvAckTimeout,
                 EvMacFrame, EvTraffic, EvPhenomenonEmit, EvSenseArrive, EvSensorSample, EvAction>;

struct Event {
    SimTime due = 0;
    std::uint64_t seq = 0;  // insertion counter; (due, seq) is the total order
    std::uint32_t node = 0;
    Layer layer = Layer::Kernel;
    EventPayload payload;
};

}  // namespace uwbsim
