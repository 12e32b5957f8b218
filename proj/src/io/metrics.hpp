#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/sim_time.hpp"
#include "io/trace.hpp"

namespace uwbsim {

struct FlowMetrics {
    std::string name;
    std::uint32_t src = UINT32_MAX;
    std::uint32_t dst = UINT32_MAX;
    std::uint32_t payload_bits_hint = 0;  // per-packet payload, for throughput
    std::uint64_t offered = 0;
    std::uint64_t delivered = 0;
    std::uint64_t failed = 0;  // reliable variants: retry budget exhausted
    double per = 0.0;
    SimTime latency_mean = 0;
    SimTime latency_p95 = 0;
};

struct NodeEnergyMetrics {
    std::uint64_t pulses_tx = 0;
    std::uint64_t pulses_rx = 0;
    std::map<std::string, SimTime> state_ticks;
    double total_joules = 0.0;
};

struct MetricsSummary {
    std::uint64_t seed = 0;
    SimTime duration = 0;
    std::uint64_t events_dispatched = 0;
    std::vector<FlowMetrics> flows;               // indexed by flow id
    std::map<std::uint32_t, NodeEnergyMetrics> nodes;
    std::uint64_t pulse_collisions = 0;
    std::uint64_t delivered_payload_bits = 0;
    double throughput_bps = 0.0;
};

/// Builds the run summary from the trace record stream and nothing else, so
/// the same numbers can be recomputed offline from a trace file.
class MetricsAccumulator : public TraceSink {
public:
    explicit MetricsAccumulator(std::vector<FlowMetrics> flow_shells);

    void emit(const TraceRecord& r) override;

    MetricsSummary finalize(std::uint64_t seed, SimTime duration,
                            std::uint64_t events_dispatched);

private:
    MetricsSummary summary_;
    std::vector<std::vector<SimTime>> latencies_;
};

/// Re-derives a summary from a trace file; the per-flow shells give names and
/// endpoints for flows that never saw traffic. Throws on malformed rows with
/// the line number.
MetricsSummary summarize_trace_file(const std::string& path,
                                    std::vector<FlowMetrics> flow_shells, std::uint64_t seed,
                                    SimTime duration);

std::string metrics_to_json(const MetricsSummary& s);

}  // namespace uwbsim
