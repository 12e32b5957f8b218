#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace uwbsim;
using testutil::base_doc;
using testutil::parse_ok;
using testutil::run_recorded;
using testutil::write_step_ber;

namespace {

// Step threshold at 3 dB: interference-free pulses always decode, a 0 dB
// collision never does.
std::string step3() { return write_step_ber("step3.csv", 3.0); }

nlohmann::json single_flow_doc(std::uint32_t packets) {
    auto doc = base_doc(step3());
    doc["sim"]["duration_s"] = packets * 1e-5;
    doc["traffic"].push_back({{"name", "f"},
                              {"src", 1},
                              {"dst", 0},
                              {"payload_bits", 12},
                              {"period_s", 1e-5}});
    return doc;
}

}  // namespace

TEST_CASE("clean link delivers everything with the composed latency") {
    const auto run = run_recorded(parse_ok(single_flow_doc(100)), 1);
    const FlowMetrics& f = run.metrics.flows[0];
    CHECK(f.offered == 100);
    CHECK(f.delivered == 100);
    CHECK(f.per == 0.0);

    // latency = slot wait + airtime + flight time, exactly in ticks:
    // enqueue on a frame boundary, hop slot 1 -> wait 10 ns; 32 bits of
    // 80 ns frames; 1 m of flight rounds to 3336 ps.
    const SimTime expected = 10'000 + 32 * 80'000 + 3'336;
    CHECK(f.latency_mean == expected);
    CHECK(f.latency_p95 == expected);
    for (const auto& r : run.sink.records) {
        if (r.event == TraceEvent::MacDeliver) CHECK(static_cast<SimTime>(r.value) == expected);
    }

    CHECK(run.metrics.pulse_collisions == 0);
    CHECK(run.metrics.nodes.at(1).pulses_tx == 100 * 32);  // one pulse per bit
    CHECK(run.metrics.nodes.at(0).pulses_rx == 100 * 32);
}

TEST_CASE("per-node state durations tile the run exactly") {
    const auto run = run_recorded(parse_ok(single_flow_doc(50)), 1);
    for (const auto& [id, energy] : run.metrics.nodes) {
        SimTime total = 0;
        for (const auto& [state, ticks] : energy.state_ticks) total += ticks;
        CHECK(total == run.metrics.duration);
    }
    // transmitter: one transmit slot per pulse
    CHECK(run.metrics.nodes.at(1).state_ticks.at("transmit") == 50 * 32 * 10'000);
    CHECK(run.metrics.nodes.at(0).state_ticks.at("receive") == 50 * 32 * 10'000);
}

TEST_CASE("orthogonal hops with equal flight times share the receiver cleanly") {
    auto doc = base_doc(step3());
    doc["sim"]["duration_s"] = 1e-3;
    // nodes 1 and 2 both 1 m from node 0, hop slots 1 and 2
    doc["traffic"] = nlohmann::json::array(
        {nlohmann::json{
             {"name", "a"}, {"src", 1}, {"dst", 0}, {"payload_bits", 12}, {"period_s", 1e-5}},
         nlohmann::json{
             {"name", "b"}, {"src", 2}, {"dst", 0}, {"payload_bits", 12}, {"period_s", 1e-5}}});
    const auto run = run_recorded(parse_ok(doc), 1);
    CHECK(run.metrics.flows[0].delivered == run.metrics.flows[0].offered);
    CHECK(run.metrics.flows[1].delivered == run.metrics.flows[1].offered);
    CHECK(run.metrics.pulse_collisions == 0);
}

TEST_CASE("identical hops with equal flight times collide pulse for pulse") {
    auto doc = base_doc(step3());
    doc["sim"]["duration_s"] = 1e-3;
    doc["nodes"][2]["ths"] = 1;  // same hop value as node 1, same distance
    doc["traffic"] = nlohmann::json::array(
        {nlohmann::json{
             {"name", "a"}, {"src", 1}, {"dst", 0}, {"payload_bits", 12}, {"period_s", 1e-5}},
         nlohmann::json{
             {"name", "b"}, {"src", 2}, {"dst", 0}, {"payload_bits", 12}, {"period_s", 1e-5}}});
    const auto run = run_recorded(parse_ok(doc), 1);
    CHECK(run.metrics.flows[0].delivered == 0);
    CHECK(run.metrics.flows[1].delivered == 0);
    // every bit of every packet pair shares its window
    CHECK(run.metrics.pulse_collisions == run.metrics.flows[0].offered * 32);
    // equal powers: source 1 wins the tie, its packets die on bit errors,
    // the other packets never get the lock
    CHECK(run.sink.count_drop("bit-error", 0) == run.metrics.flows[0].offered);
    CHECK(run.sink.count_drop("receiver-busy", 0) == run.metrics.flows[1].offered);
}

TEST_CASE("a one-slot delay offset defeats orthogonal hopping end to end") {
    // Fig-1-style geometry: receiver at the origin, the near transmitter on
    // hop slot 2 at 1 m, the far one on hop slot 1 with exactly one slot of
    // extra flight time (10 ns of light is 2.99792458 m). The far node's
    // transmit power is raised to equalize received powers.
    const double d2 = 1.0 + 2.99792458;
    auto doc = base_doc(step3());
    doc["sim"]["duration_s"] = 1e-3;
    doc["nodes"][1]["ths"] = 2;
    doc["nodes"][2] = {{"id", 2},
                       {"x", d2},
                       {"y", 0.0},
                       {"ths", 1},
                       {"tx_power_w", 1e-3 * d2 * d2}};
    doc["traffic"] = nlohmann::json::array(
        {nlohmann::json{
             {"name", "near"}, {"src", 1}, {"dst", 0}, {"payload_bits", 12}, {"period_s", 1e-5}},
         nlohmann::json{
             {"name", "far"}, {"src", 2}, {"dst", 0}, {"payload_bits", 12}, {"period_s", 1e-5}}});
    const auto run = run_recorded(parse_ok(doc), 1);

    CHECK(run.metrics.flows[0].delivered == 0);
    CHECK(run.metrics.flows[1].delivered == 0);
    CHECK(run.metrics.pulse_collisions == run.metrics.flows[0].offered * 32);
    CHECK(run.sink.count_drop("bit-error", 0) == run.metrics.flows[0].offered);
    CHECK(run.sink.count_drop("receiver-busy", 0) == run.metrics.flows[1].offered);
}

TEST_CASE("sub-sensitivity packets sense but never deliver") {
    auto doc = base_doc(step3());
    doc["sim"]["duration_s"] = 1e-4;
    doc["nodes"][1]["x"] = 2000.0;  // about -102 dBm received, below -95 dBm
    doc["traffic"].push_back(
        {{"name", "f"}, {"src", 1}, {"dst", 0}, {"payload_bits", 12}, {"period_s", 1e-5}});
    const auto run = run_recorded(parse_ok(doc), 1);
    CHECK(run.metrics.flows[0].delivered == 0);
    CHECK(run.sink.count_drop("below-sensitivity", 0) == run.metrics.flows[0].offered);
    CHECK(run.metrics.nodes.at(0).state_ticks.at("sense") > 0);
    CHECK(run.metrics.nodes.at(0).state_ticks.at("receive") == 0);
}

TEST_CASE("a transmitter discards arrivals landing on its own hop slot") {
    auto doc = base_doc(step3());
    doc["sim"]["duration_s"] = 1e-3;
    // node 2 hops on slot 1 and sits so its pulses land exactly on node 1's
    // transmit slot: one slot of extra flight from 1 m away on the same axis.
    doc["nodes"][1]["ths"] = 2;
    doc["nodes"][2] = {{"id", 2}, {"x", 1.0 + 2.99792458}, {"y", 0.0}, {"ths", 1}};
    // node 1 streams constantly so it is always transmitting
    doc["traffic"] = nlohmann::json::array(
        {nlohmann::json{
             {"name", "busy"}, {"src", 1}, {"dst", 0}, {"payload_bits", 12}, {"period_s", 2.6e-6}},
         nlohmann::json{
             {"name", "victim"}, {"src", 2}, {"dst", 1}, {"payload_bits", 12}, {"period_s", 1e-5}}});
    const auto run = run_recorded(parse_ok(doc), 1);
    CHECK(run.metrics.flows[1].delivered == 0);
    CHECK(run.sink.count_drop("tx-busy", 1) == run.metrics.flows[1].offered);
}

TEST_CASE("same seed reproduces the trace byte for byte") {
    auto doc = base_doc(write_step_ber("det.csv", 3.0));
    doc["sim"]["duration_s"] = 5e-4;
    doc["mac"]["forced_data_loss_p"] = 0.3;
    doc["traffic"].push_back(
        {{"name", "f"}, {"src", 1}, {"dst", 0}, {"payload_bits", 12}, {"period_s", 1e-5}});
    const Scenario s = parse_ok(doc);

    auto read_file = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    const std::string t1 = (testutil::temp_dir() / "det1.csv").string();
    const std::string t2 = (testutil::temp_dir() / "det2.csv").string();
    const std::string t3 = (testutil::temp_dir() / "det3.csv").string();
    run_scenario(s, 7, t1);
    run_scenario(s, 7, t2);
    run_scenario(s, 8, t3);
    const std::string b1 = read_file(t1);
    CHECK(b1 == read_file(t2));
    CHECK(b1 != read_file(t3));
    CHECK(b1.find(CsvTraceWriter::header()) == 0);
}
