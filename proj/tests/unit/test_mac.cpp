#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"

using namespace uwbsim;
using testutil::base_doc;
using testutil::parse_ok;
using testutil::run_recorded;
using testutil::write_step_ber;

namespace {

nlohmann::json reliable_doc(const std::string& protocol, double loss_p, int limit,
                            std::uint32_t packets, double period_s = 2e-4) {
    auto doc = base_doc(write_step_ber("mac.csv", 3.0));
    doc["sim"]["duration_s"] = packets * period_s + 0.002;
    doc["mac"]["protocol"] = protocol;
    doc["mac"]["header_bits"] = 16;
    doc["mac"]["forced_data_loss_p"] = loss_p;
    doc["mac"]["retransmission_limit"] = limit;
    doc["traffic"].push_back({{"name", "f"},
                              {"src", 1},
                              {"dst", 0},
                              {"payload_bits", 8},
                              {"period_s", period_s},
                              {"stop_s", packets * period_s}});
    if (protocol.find("slotted") != std::string::npos) {
        doc["mac"]["mac_frame_s"] = 32e-7;  // 40 radio frames
        doc["mac"]["allocation_cycle"] = 2;
        doc["mac"]["allocation"] = {{"0", {1}}, {"1", {0}}};
    }
    return doc;
}

std::size_t count_data_tx(const testutil::RecordingSink& sink) {
    std::size_t n = 0;
    for (const auto& r : sink.records) {
        n += r.event == TraceEvent::MacTxStart && r.detail.empty();
    }
    return n;
}

}  // namespace

TEST_CASE("unslotted sends queue FIFO while the radio is busy") {
    auto doc = base_doc(write_step_ber("fifo.csv", 3.0));
    doc["sim"]["duration_s"] = 1e-3;
    // period shorter than the airtime: everything still goes out, in order
    doc["traffic"].push_back(
        {{"name", "f"}, {"src", 1}, {"dst", 0}, {"payload_bits", 12}, {"period_s", 1e-6}});
    const auto run = run_recorded(parse_ok(doc), 1);
    const FlowMetrics& f = run.metrics.flows[0];
    CHECK(f.offered > f.delivered);  // tail still queued at the end of the run
    CHECK(f.delivered > 0);
    std::int64_t prev_seq = -1;
    for (const auto& r : run.sink.records) {
        if (r.event == TraceEvent::MacDeliver) {
            CHECK(r.seq == prev_seq + 1);  // in order, no gaps, no duplicates
            prev_seq = r.seq;
        }
    }
}

TEST_CASE("reliable-unslotted: a timely ACK means exactly one attempt") {
    const auto run = run_recorded(parse_ok(reliable_doc("reliable-unslotted-th", 0.0, 3, 20)), 1);
    const FlowMetrics& f = run.metrics.flows[0];
    CHECK(f.delivered == f.offered);
    CHECK(count_data_tx(run.sink) == f.offered);
    CHECK(run.sink.count(TraceEvent::MacAckRx) == f.offered);
    CHECK(run.sink.count(TraceEvent::MacFailure) == 0);
}

TEST_CASE("reliable-unslotted: losing every attempt uses the full retry budget") {
    const auto run = run_recorded(parse_ok(reliable_doc("reliable-unslotted-th", 1.0, 3, 10)), 1);
    const FlowMetrics& f = run.metrics.flows[0];
    CHECK(f.delivered == 0);
    CHECK(f.failed == f.offered);
    CHECK(count_data_tx(run.sink) == f.offered * 4);  // limit 3 -> 4 attempts
    for (const auto& r : run.sink.records) {
        if (r.event == TraceEvent::MacFailure) CHECK(r.attempt == 4);
    }
}

TEST_CASE("reliable delivery follows 1 - p^(R+1) under forced loss") {
    for (const char* protocol : {"reliable-unslotted-th", "reliable-slotted-th"}) {
        const double p = 0.5;
        const int limit = 2;
        const std::uint32_t packets = 2000;
        const auto run = run_recorded(parse_ok(reliable_doc(protocol, p, limit, packets)), 3);
        const FlowMetrics& f = run.metrics.flows[0];
        REQUIRE(f.offered == packets);
        const double expected = 1.0 - std::pow(p, limit + 1);
        const double sigma = std::sqrt(expected * (1.0 - expected) / packets);
        const double measured = static_cast<double>(f.delivered) / packets;
        CHECK(std::fabs(measured - expected) <= 3.0 * sigma);
    }
}

TEST_CASE("a late ACK triggers one duplicate, delivered upward only once") {
    auto doc = reliable_doc("reliable-unslotted-th", 0.0, 3, 1);
    // timer shorter than the ACK round trip: the first attempt is answered,
    // but only after the retransmission already left
    doc["mac"]["retransmission_delay_s"] = 1e-6;
    const auto run = run_recorded(parse_ok(doc), 1);
    CHECK(run.metrics.flows[0].offered == 1);
    CHECK(run.metrics.flows[0].delivered == 1);
    CHECK(count_data_tx(run.sink) == 2);
    CHECK(run.sink.count(TraceEvent::MacDeliver) == 1);
    CHECK(run.sink.count(TraceEvent::MacDuplicate) == 1);
    CHECK(run.sink.count(TraceEvent::MacAckRx) == 1);
    CHECK(run.sink.count(TraceEvent::MacAckUnexpected) == 1);
}

TEST_CASE("slotted transmissions start exactly on allocated MAC frame fronts") {
    auto doc = reliable_doc("slotted-th", 0.0, 0, 40, 1e-5);
    const Scenario s = parse_ok(doc);
    const auto run = run_recorded(s, 1);
    CHECK(run.metrics.flows[0].delivered == run.metrics.flows[0].offered);
    const SimTime d = s.mac.mac_frame_ticks;
    std::size_t starts = 0;
    for (const auto& r : run.sink.records) {
        if (r.event != TraceEvent::MacTxStart) continue;
        ++starts;
        CHECK(r.time % d == 0);
        CHECK((r.time / d) % 2 == 0);  // node 1 owns frame 0 of every cycle of 2
    }
    CHECK(starts == run.metrics.flows[0].offered);
}

TEST_CASE("disjoint allocations exclude each other even on one hop slot") {
    auto doc = base_doc(write_step_ber("excl.csv", 3.0));
    doc["sim"]["duration_s"] = 2e-3;
    doc["mac"]["protocol"] = "slotted-th";
    doc["mac"]["header_bits"] = 16;
    doc["mac"]["mac_frame_s"] = 32e-7;
    doc["mac"]["allocation_cycle"] = 2;
    doc["mac"]["allocation"] = {{"1", {0}}, {"2", {1}}};
    doc["nodes"][2]["ths"] = 1;  // same hop value as node 1, same distance
    doc["traffic"] = nlohmann::json::array(
        {nlohmann::json{
             {"name", "a"}, {"src", 1}, {"dst", 0}, {"payload_bits", 8}, {"period_s", 1e-5}},
         nlohmann::json{
             {"name", "b"}, {"src", 2}, {"dst", 0}, {"payload_bits", 8}, {"period_s", 1e-5}}});
    const auto run = run_recorded(parse_ok(doc), 1);
    CHECK(run.metrics.flows[0].delivered == run.metrics.flows[0].offered);
    CHECK(run.metrics.flows[1].delivered == run.metrics.flows[1].offered);
    CHECK(run.metrics.pulse_collisions == 0);
}

TEST_CASE("slot sharing works when the hop slots are orthogonal") {
    auto doc = base_doc(write_step_ber("share.csv", 3.0));
    doc["sim"]["duration_s"] = 2e-3;
    doc["mac"]["protocol"] = "slotted-th";
    doc["mac"]["header_bits"] = 16;
    doc["mac"]["mac_frame_s"] = 32e-7;
    doc["mac"]["allocation_cycle"] = 1;
    doc["mac"]["allocation"] = {{"1", {0}}, {"2", {0}}};  // both nodes share every frame
    doc["traffic"] = nlohmann::json::array(
        {nlohmann::json{
             {"name", "a"}, {"src", 1}, {"dst", 0}, {"payload_bits", 8}, {"period_s", 1e-5}},
         nlohmann::json{
             {"name", "b"}, {"src", 2}, {"dst", 0}, {"payload_bits", 8}, {"period_s", 1e-5}}});
    const auto run = run_recorded(parse_ok(doc), 1);
    CHECK(run.metrics.flows[0].delivered == run.metrics.flows[0].offered);
    CHECK(run.metrics.flows[1].delivered == run.metrics.flows[1].offered);
    CHECK(run.metrics.pulse_collisions == 0);
}

TEST_CASE("reliable-slotted retransmits exactly at the next allocated front") {
    auto doc = reliable_doc("reliable-slotted-th", 1.0, 3, 1);
    const Scenario s = parse_ok(doc);
    const auto run = run_recorded(s, 1);
    CHECK(run.metrics.flows[0].failed == 1);
    std::vector<SimTime> starts;
    for (const auto& r : run.sink.records) {
        if (r.event == TraceEvent::MacTxStart && r.detail.empty()) starts.push_back(r.time);
    }
    REQUIRE(starts.size() == 4);
    const SimTime cycle =
        static_cast<SimTime>(s.mac.allocation_cycle) * s.mac.mac_frame_ticks;
    for (std::size_t k = 1; k < starts.size(); ++k) {
        CHECK(starts[k] - starts[k - 1] == cycle);  // k-th attempt one cycle later
    }
}

TEST_CASE("reliable-slotted with a clean channel acknowledges within one cycle") {
    const auto run = run_recorded(parse_ok(reliable_doc("reliable-slotted-th", 0.0, 3, 10)), 1);
    const FlowMetrics& f = run.metrics.flows[0];
    CHECK(f.delivered == f.offered);
    CHECK(count_data_tx(run.sink) == f.offered);
    CHECK(run.sink.count(TraceEvent::MacFailure) == 0);
}
