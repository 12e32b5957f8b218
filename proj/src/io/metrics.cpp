#include "io/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace uwbsim {

MetricsAccumulator::MetricsAccumulator(std::vector<FlowMetrics> flow_shells) {
    summary_.flows = std::move(flow_shells);
    latencies_.resize(summary_.flows.size());
}

void MetricsAccumulator::emit(const TraceRecord& r) {
    switch (r.event) {
        case TraceEvent::MacEnqueue:
            if (r.flow != UINT32_MAX && r.flow < summary_.flows.size()) {
                summary_.flows[r.flow].offered += 1;
            }
            break;
        case TraceEvent::MacDeliver:
            if (r.flow != UINT32_MAX && r.flow < summary_.flows.size()) {
                auto& f = summary_.flows[r.flow];
                f.delivered += 1;
                latencies_[r.flow].push_back(static_cast<SimTime>(r.value));
            }
            break;
        case TraceEvent::MacFailure:
            if (r.flow != UINT32_MAX && r.flow < summary_.flows.size()) {
                summary_.flows[r.flow].failed += 1;
            }
            break;
        case TraceEvent::PhyCollision:
            summary_.pulse_collisions += 1;
            break;
        case TraceEvent::EnergyReport: {
            NodeEnergyMetrics ne;
            // detail: pulses_tx=..;pulses_rx=..;t_<state>_ps=..;total_j=..
            std::size_t pos = 0;
            while (pos < r.detail.size()) {
                std::size_t semi = r.detail.find(';', pos);
                if (semi == std::string::npos) semi = r.detail.size();
                const std::string kv = r.detail.substr(pos, semi - pos);
                pos = semi + 1;
                const std::size_t eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = kv.substr(0, eq);
                const std::string val = kv.substr(eq + 1);
                if (key == "pulses_tx") ne.pulses_tx = std::stoull(val);
                else if (key == "pulses_rx") ne.pulses_rx = std::stoull(val);
                else if (key == "total_j") ne.total_joules = std::stod(val);
                else if (key.rfind("t_", 0) == 0 && key.size() > 5) {
                    ne.state_ticks[key.substr(2, key.size() - 5)] = std::stoll(val);
                }
            }
            summary_.nodes[r.node] = std::move(ne);
            break;
        }
        default:
            break;
    }
}

MetricsSummary MetricsAccumulator::finalize(std::uint64_t seed, SimTime duration,
                                            std::uint64_t events_dispatched) {
    summary_.seed = seed;
    summary_.duration = duration;
    summary_.events_dispatched = events_dispatched;
    summary_.delivered_payload_bits = 0;
    for (std::size_t i = 0; i < summary_.flows.size(); ++i) {
        auto& f = summary_.flows[i];
        f.per = f.offered == 0
                    ? 0.0
                    : 1.0 - static_cast<double>(f.delivered) / static_cast<double>(f.offered);
        auto& lat = latencies_[i];
        if (!lat.empty()) {
            SimTime sum = 0;
            for (SimTime v : lat) sum += v;
            f.latency_mean = sum / static_cast<SimTime>(lat.size());
            std::sort(lat.begin(), lat.end());
            const std::size_t idx =
                static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(lat.size()))) - 1;
            f.latency_p95 = lat[std::min(idx, lat.size() - 1)];
        }
        summary_.delivered_payload_bits += f.delivered * f.payload_bits_hint;
    }
    summary_.throughput_bps =
        duration > 0 ? static_cast<double>(summary_.delivered_payload_bits) /
                           seconds_from_ticks(duration)
                     : 0.0;
    return summary_;
}

MetricsSummary summarize_trace_file(const std::string& path,
                                    std::vector<FlowMetrics> flow_shells, std::uint64_t seed,
                                    SimTime duration) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trace file empty: " + path);
    MetricsAccumulator acc(std::move(flow_shells));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        acc.emit(parse_trace_line(line, line_no));
    }
    return acc.finalize(seed, duration, 0);
}

std::string metrics_to_json(const MetricsSummary& s) {
    nlohmann::ordered_json j;
    j["seed"] = s.seed;
    j["duration_ps"] = s.duration;
    j["events_dispatched"] = s.events_dispatched;
    j["flows"] = nlohmann::ordered_json::array();
    for (const auto& f : s.flows) {
        nlohmann::ordered_json jf;
        jf["name"] = f.name;
        jf["src"] = f.src;
        jf["dst"] = f.dst;
        jf["offered"] = f.offered;
        jf["delivered"] = f.delivered;
        jf["failed"] = f.failed;
        jf["per"] = f.per;
        jf["latency_mean_ps"] = f.latency_mean;
        jf["latency_p95_ps"] = f.latency_p95;
        j["flows"].push_back(std::move(jf));
    }
    j["nodes"] = nlohmann::ordered_json::object();
    for (const auto& [id, ne] : s.nodes) {
        nlohmann::ordered_json jn;
        jn["pulses_tx"] = ne.pulses_tx;
        jn["pulses_rx"] = ne.pulses_rx;
        for (const auto& [state, ticks] : ne.state_ticks) {
            jn["t_" + state + "_ps"] = ticks;
        }
        jn["total_j"] = ne.total_joules;
        j["nodes"][std::to_string(id)] = std::move(jn);
    }
    j["global"]["pulse_collisions"] = s.pulse_collisions;
    j["global"]["delivered_payload_bits"] = s.delivered_payload_bits;
    j["global"]["throughput_bps"] = s.throughput_bps;
    return j.dump(2);
}

}  // namespace uwbsim
