#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "core/event.hpp"
#include "core/sim_time.hpp"

namespace uwbsim {

struct RunStats {
    std::uint64_t dispatched = 0;
};

/// Deterministic single-threaded discrete-event kernel. Events are dispatched
/// in (due, seq) order; seq is the insertion counter, so simultaneous events
/// fire in the order they were scheduled. A kernel instance carries no global
/// state, so independent runs can execute in parallel threads.
class EventKernel {
public:
    using Dispatcher = std::function<void(const Event&)>;

    explicit EventKernel(Dispatcher dispatcher) : dispatch_(std::move(dispatcher)) {}

    SimTime now() const { return now_; }
    std::size_t pending() const { return queue_.size(); }

    /// Throws std::logic_error if due lies in the past.
    void schedule(SimTime due, std::uint32_t node, Layer layer, EventPayload payload);

    /// Dispatches every event with due <= t_end. The clock follows the due
    /// time of each dispatched event and never moves backwards.
    RunStats run_until(SimTime t_end);

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.due != b.due) return a.due > b.due;
            return a.seq > b.seq;
        }
    };

    Dispatcher dispatch_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    SimTime now_ = 0;
    std::uint64_t next_seq_ = 0;
};

}  // namespace uwbsim
