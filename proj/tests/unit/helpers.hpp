#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "io/scenario.hpp"
#include "io/trace.hpp"
#include "sim/simulation.hpp"

namespace testutil {

inline std::filesystem::path temp_dir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("uwbsim_tests_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::string write_file(const std::string& name, const std::string& content) {
    const auto path = temp_dir() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

/// Effectively a step table: BER 1 below the threshold, 0 at and above it.
inline std::string write_step_ber(const std::string& name, double threshold_db) {
    std::string csv = "snr_db,ber\n";
    csv += std::to_string(threshold_db - 1e-3) + ",1\n";
    csv += std::to_string(threshold_db) + ",0\n";
    return write_file(name, csv);
}

inline std::string write_clean_ber(const std::string& name) {
    return write_file(name, "snr_db,ber\n-200,0\n200,0\n");
}

/// Two transmitters (1, 2) and a common receiver 0, 10 ns slots, 8 slots per
/// frame, clean channel. Callers adjust fields before parsing.
inline nlohmann::json base_doc(const std::string& ber_path) {
    nlohmann::json j;
    j["sim"] = {{"duration_s", 0.01}, {"seed", 1}};
    j["channel"] = {{"center_frequency_hz", 4e9},
                    {"bandwidth_hz", 5e8},
                    {"noise_temperature_k", 290.0},
                    {"path_loss_exponent", 2.0},
                    {"reference_distance_m", 1.0}};
    j["radio"] = {{"slot_s", 1e-8},
                  {"frame_s", 8e-8},
                  {"slots_per_frame", 8},
                  {"tx_power_w", 1e-3},
                  {"sensitivity_dbm", -95.0}};
    j["mac"] = {{"protocol", "unslotted-th"}, {"header_bits", 20}};
    j["nodes"] = nlohmann::json::array({
        nlohmann::json{{"id", 0}, {"x", 0.0}, {"y", 0.0}, {"role", "sink"}, {"ths", 0}},
        nlohmann::json{{"id", 1}, {"x", 1.0}, {"y", 0.0}, {"ths", 1}},
        nlohmann::json{{"id", 2}, {"x", -1.0}, {"y", 0.0}, {"ths", 2}},
    });
    j["traffic"] = nlohmann::json::array();
    j["ber_table"] = ber_path;
    return j;
}

inline uwbsim::Scenario parse_ok(const nlohmann::json& doc) {
    auto result = uwbsim::parse_scenario(doc, "");
    if (!result.ok()) {
        throw std::runtime_error("scenario unexpectedly invalid:\n" + result.errors_joined());
    }
    return std::move(*result.scenario);
}

struct RecordingSink final : uwbsim::TraceSink {
    std::vector<uwbsim::TraceRecord> records;
    void emit(const uwbsim::TraceRecord& r) override { records.push_back(r); }

    std::size_t count(uwbsim::TraceEvent e) const {
        std::size_t n = 0;
        for (const auto& r : records) n += r.event == e;
        return n;
    }
    std::size_t count_drop(const std::string& reason, std::uint32_t node = UINT32_MAX) const {
        std::size_t n = 0;
        for (const auto& r : records) {
            if (r.event == uwbsim::TraceEvent::PhyDrop && r.detail == reason &&
                (node == UINT32_MAX || r.node == node)) {
                ++n;
            }
        }
        return n;
    }
};

struct RunWithTrace {
    uwbsim::MetricsSummary metrics;
    RecordingSink sink;
};

inline RunWithTrace run_recorded(const uwbsim::Scenario& s, std::uint64_t seed) {
    RunWithTrace out;
    uwbsim::Simulation sim(s, seed);
    sim.add_sink(&out.sink);
    out.metrics = sim.run();
    return out;
}

}  // namespace testutil
