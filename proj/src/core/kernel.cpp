#include "core/kernel.hpp"

#include <stdexcept>
#include <string>

namespace uwbsim {

void EventKernel::schedule(SimTime due, std::uint32_t node, Layer layer, EventPayload payload) {
    if (due < now_) {
        throw std::logic_error("schedule into the past: due=" + std::to_string(due) +
                               " now=" + std::to_string(now_));
    }
    queue_.push(Event{due, next_seq_++, node, layer, std::move(payload)});
}

RunStats EventKernel::run_until(SimTime t_end) {
    RunStats stats;
    while (!queue_.empty() && queue_.top().due <= t_end) {
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.due;
        dispatch_(ev);
        ++stats.dispatched;
    }
    return stats;
}

}  // namespace uwbsim
