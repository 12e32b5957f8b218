#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "helpers.hpp"
#include "sensing/sensing.hpp"

using namespace uwbsim;
using testutil::base_doc;
using testutil::parse_ok;
using testutil::run_recorded;
using testutil::write_step_ber;

TEST_CASE("received intensity follows the sensing path loss") {
    Phenomenon ph;
    ph.source_intensity = 8.0;
    ph.path_loss_exponent = 2.0;
    ph.reference_distance_m = 1.0;
    CHECK(received_intensity(ph, 1.0) == 8.0);
    CHECK(received_intensity(ph, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(received_intensity(ph, 4.0) == doctest::Approx(0.5).epsilon(1e-12));
    // co-located sensor: distance clamps to the reference distance
    CHECK(received_intensity(ph, 0.0) == 8.0);
}

TEST_CASE("ideal sensors are exact threshold detectors") {
    SensorDevice dev;
    dev.detection_threshold = 0.5;
    CHECK(sense(dev, 0.5, 0.0));
    CHECK(sense(dev, 10.0, 0.999));
    CHECK_FALSE(sense(dev, 0.4999, 0.0));
    CHECK_FALSE(sense_needs_draw(dev, 10.0));
    CHECK_FALSE(sense_needs_draw(dev, 0.1));
}

TEST_CASE("false negatives and false positives flip per sample") {
    SensorDevice dev;
    dev.detection_threshold = 0.5;
    dev.false_negative_rate = 0.1;
    dev.false_positive_rate = 0.05;
    CHECK_FALSE(sense(dev, 1.0, 0.05));  // in range, unlucky draw
    CHECK(sense(dev, 1.0, 0.15));
    CHECK(sense(dev, 0.1, 0.01));  // out of range, false positive
    CHECK_FALSE(sense(dev, 0.1, 0.99));
    CHECK(sense_needs_draw(dev, 1.0));
    CHECK(sense_needs_draw(dev, 0.1));
}

namespace {

nlohmann::json sensing_doc() {
    auto doc = base_doc(write_step_ber("sense.csv", 3.0));
    doc["sim"]["duration_s"] = 0.02;
    // ring of sensors at 1..10 m from the phenomenon at the origin; the sink
    // sits far off to the side so radio reception does not matter here
    doc["nodes"] = nlohmann::json::array();
    doc["nodes"].push_back({{"id", 0}, {"x", 0.0}, {"y", 50.0}, {"role", "sink"}, {"ths", 0}});
    for (int i = 1; i <= 10; ++i) {
        doc["nodes"].push_back({{"id", i},
                                {"x", static_cast<double>(i)},
                                {"y", 0.0},
                                {"ths", i % 8}});
    }
    doc["sensing"] = {
        {"phenomenon",
         {{"x", 0.0},
          {"y", 0.0},
          {"source_intensity", 1.0},
          {"sampling_rate_hz", 1000.0},
          {"path_loss_exponent", 2.0},
          {"start_s", 0.0},
          {"stop_s", 0.01}}},
        {"device", {{"detection_threshold", 1.0 / 12.25}}},  // range = 3.5 m
        {"sink", 0},
        {"report_payload_bits", 16},
        {"suppression_s", 1.0},  // one report per node per run
    };
    return doc;
}

}  // namespace

TEST_CASE("the detection region is a sphere around the phenomenon") {
    const auto run = run_recorded(parse_ok(sensing_doc()), 1);
    // threshold 1/12.25 with n = 2 puts the radius at 3.5 m: nodes 1..3 hear
    // it, nodes 4..10 never do
    CHECK(run.sink.count(TraceEvent::SensorReport) == 3);
    std::set<std::uint32_t> reporters;
    for (const auto& r : run.sink.records) {
        if (r.event == TraceEvent::SensorReport) reporters.insert(r.node);
    }
    CHECK(reporters == std::set<std::uint32_t>{1, 2, 3});
    // and the reports actually reach the sink over the radio
    std::uint64_t delivered = 0;
    for (const auto& f : run.metrics.flows) delivered += f.delivered;
    CHECK(delivered == 3);
}

TEST_CASE("sample count is floor(active duration x rate) + 1 per sensor") {
    const auto run = run_recorded(parse_ok(sensing_doc()), 1);
    std::map<std::uint32_t, std::size_t> samples;
    for (const auto& r : run.sink.records) {
        if (r.event == TraceEvent::SensorSample) samples[r.node] += 1;
    }
    for (int i = 1; i <= 10; ++i) {
        CHECK(samples[static_cast<std::uint32_t>(i)] == 11);  // 0.01 s at 1 kHz
    }
}

TEST_CASE("false negatives thin detections at the configured rate") {
    auto doc = sensing_doc();
    doc["sensing"]["phenomenon"]["sampling_rate_hz"] = 100000.0;
    doc["sensing"]["phenomenon"]["stop_s"] = 0.01;
    doc["sensing"]["device"]["false_negative_rate"] = 0.1;
    doc["sim"]["duration_s"] = 0.02;
    const auto run = run_recorded(parse_ok(doc), 5);

    std::size_t in_range_samples = 0, detections = 0;
    for (const auto& r : run.sink.records) {
        if (r.event != TraceEvent::SensorSample || r.node != 1) continue;
        ++in_range_samples;
        detections += r.detail == "detected";
    }
    CHECK(in_range_samples == 1001);
    const double expected = 0.9;
    const double sigma = std::sqrt(expected * (1 - expected) / in_range_samples);
    CHECK(std::fabs(static_cast<double>(detections) / in_range_samples - expected) <=
          3 * sigma);
}

TEST_CASE("quiet sensors self-sample and can fire false positives") {
    auto doc = sensing_doc();
    doc["sensing"].erase("phenomenon");
    doc["sensing"]["device"]["false_positive_rate"] = 0.05;
    doc["sensing"]["device"]["sampling_rate_hz"] = 10000.0;
    doc["sim"]["duration_s"] = 0.1;
    const auto run = run_recorded(parse_ok(doc), 9);

    std::size_t samples = 0, positives = 0;
    for (const auto& r : run.sink.records) {
        if (r.event != TraceEvent::SensorSample || r.node != 5) continue;
        ++samples;
        positives += r.detail == "false-positive";
    }
    CHECK(samples == 1000);
    const double sigma = std::sqrt(0.05 * 0.95 / samples);
    CHECK(std::fabs(static_cast<double>(positives) / samples - 0.05) <= 3 * sigma);
}

TEST_CASE("the suppression window rate-limits reports") {
    auto doc = sensing_doc();
    doc["sensing"]["suppression_s"] = 0.0021;  // ~2 sample periods
    const auto run = run_recorded(parse_ok(doc), 1);
    std::map<std::uint32_t, std::vector<SimTime>> reports;
    for (const auto& r : run.sink.records) {
        if (r.event == TraceEvent::SensorReport) reports[r.node].push_back(r.time);
    }
    for (const auto& [node, times] : reports) {
        for (std::size_t k = 1; k < times.size(); ++k) {
            CHECK(times[k] - times[k - 1] >= 2'100'000'000);
        }
        CHECK(times.size() == 4);  // 11 samples, one report per 3
    }
}
