#pragma once

#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/kernel.hpp"
#include "core/random.hpp"
#include "energy/ledger.hpp"
#include "io/metrics.hpp"
#include "io/scenario.hpp"
#include "io/trace.hpp"
#include "mac/mac.hpp"
#include "phy/reception.hpp"

namespace uwbsim {

/// One transmitter-to-receiver link precomputed at setup; geometry is fixed
/// for the whole run, so delay and received power are per-packet constants.
struct LinkOut {
    std::uint32_t dst;  // node index
    SimTime delay;
    double power_w;
};

struct Transmission {
    std::uint32_t pdu = 0;
    std::uint32_t attempt = 1;
    std::uint32_t src = 0;  // node index
    SimTime first_pulse = 0;
    bool forced_loss = false;
};

struct NodeRuntime {
    const NodeSpec* spec = nullptr;
    ThsConfig ths;
    double sensitivity_w = 0.0;
    const PowerProfile* profile = nullptr;
    std::vector<LinkOut> fanout;

    MacState mac;
    bool transmitting = false;
    SimTime tx_first_pulse = 0;
    SimTime tx_end = 0;
    std::uint32_t current_tx = 0;

    std::unordered_map<std::int64_t, std::vector<PulseArrival>> windows;
    std::vector<std::optional<ReceptionContext>> ctx_by_slot;

    bool dozing = false;
    SimTime doze_since = 0;
    SimTime last_report = std::numeric_limits<SimTime>::min();

    EnergyLedger ledger;
};

/// One complete run over a validated scenario. A Simulation owns its kernel
/// and random streams and shares nothing, so independent seeds can run on
/// concurrent threads.
class Simulation {
public:
    Simulation(const Scenario& scenario, std::uint64_t seed);

    void add_sink(TraceSink* sink) { extra_sinks_.push_back(sink); }

    MetricsSummary run();

    const Scenario& scenario() const { return scenario_; }

    static std::vector<FlowMetrics> flow_shells(const Scenario& s);

private:
    void dispatch(const Event& ev);
    void emit(const TraceRecord& r);

    // PHY
    void handle_pulse_tx(std::uint32_t tx, std::uint32_t bit);
    void handle_pulse_arrive(std::uint32_t tx, std::uint32_t rx, std::uint32_t bit);
    void handle_window_close(std::uint32_t rx, std::int64_t slot);
    void handle_tx_complete(std::uint32_t node, std::uint32_t tx);
    void start_transmission(std::uint32_t node, std::uint32_t pdu, std::uint32_t attempt);

    // MAC
    void mac_request_send(std::uint32_t node, std::uint32_t pdu);
    void mac_try_start(std::uint32_t node);
    void mac_ensure_frame_event(std::uint32_t node);
    void handle_mac_frame(std::uint32_t node);
    void handle_ack_timeout(std::uint32_t node, std::uint64_t token);
    void handle_mac_handoff(std::uint32_t tx, std::uint32_t rx);
    void mac_send_ack(std::uint32_t node, const MacPdu& data);

    // Sensing and traffic
    void handle_traffic(std::uint32_t flow);
    void handle_phenomenon_emit();
    void handle_sense_sample(std::uint32_t node, double intensity);
    void handle_self_sample(std::uint32_t node);

    void update_doze(std::uint32_t node);
    void wake(std::uint32_t node);
    void finalize_run();

    std::uint32_t make_pdu(std::uint32_t src_id, std::uint32_t dst_id, PduKind kind,
                           std::uint32_t flow, std::uint32_t payload_bits);
    std::uint32_t node_index(std::uint32_t id) const { return index_of_.at(id); }
    const std::vector<std::uint32_t>& allocation_of(std::uint32_t node) const;

    Scenario scenario_;
    std::uint64_t seed_;
    EventKernel kernel_;
    RandomStreams streams_;

    std::vector<NodeRuntime> nodes_;
    std::unordered_map<std::uint32_t, std::uint32_t> index_of_;  // node id -> index
    std::vector<double> power_matrix_;                           // [src * n + dst]
    std::vector<SimTime> delay_matrix_;

    std::vector<MacPdu> pdus_;
    std::vector<Transmission> txs_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> next_seq_;

    struct FlowRuntime {
        const FlowSpec* spec;
        SimTime next_emit;
    };
    std::vector<FlowRuntime> flow_rt_;
    std::unordered_map<std::uint32_t, std::uint32_t> report_flow_of_;  // node index -> flow id

    MetricsAccumulator accumulator_;
    std::vector<TraceSink*> extra_sinks_;
    SimTime spread_ticks_ = 0;
    std::uint64_t timeout_counter_ = 0;
};

/// Convenience wrapper: run one seed, optionally writing the trace file.
MetricsSummary run_scenario(const Scenario& scenario, std::uint64_t seed,
                            const std::string& trace_path = "");

}  // namespace uwbsim
