// Command-line front end. Talks to the simulator exclusively through the
// shared library's C interface.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uwbsim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct ScenarioHandle {
    uwbsim_scenario* s = nullptr;
    ~ScenarioHandle() {
        if (s) uwbsim_scenario_free(s);
    }
};

bool parse_seed_range(const std::string& text, std::uint64_t& lo, std::uint64_t& hi) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) return false;
    try {
        lo = std::stoull(text.substr(0, dots));
        hi = std::stoull(text.substr(dots + 2));
    } catch (const std::exception&) {
        return false;
    }
    return lo <= hi;
}

int load_and_validate(const std::string& path, const std::vector<std::string>& overrides,
                      ScenarioHandle& handle) {
    const uwbsim_status st = uwbsim_scenario_load_file(path.c_str(), &handle.s);
    if (st == UWBSIM_ERR_IO) {
        std::cerr << "error: " << uwbsim_last_error() << "\n";
        return kExitRuntime;
    }
    if (st != UWBSIM_OK) {
        std::cerr << "error: " << uwbsim_last_error() << "\n";
        return kExitValidation;
    }
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: override '" << kv << "' is not KEY=VALUE\n";
            return kExitValidation;
        }
        if (uwbsim_scenario_set(handle.s, kv.substr(0, eq).c_str(),
                                kv.substr(eq + 1).c_str()) != UWBSIM_OK) {
            std::cerr << "error: " << uwbsim_last_error() << "\n";
            return kExitValidation;
        }
    }
    if (uwbsim_scenario_validate(handle.s) != UWBSIM_OK) {
        std::cerr << uwbsim_scenario_errors(handle.s) << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

struct SeedOutcome {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    nlohmann::json metrics;
};

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

int cmd_run(const std::string& scenario_path, const std::vector<std::string>& overrides,
            std::optional<std::uint64_t> seed_opt, const std::string& seeds_text,
            const std::string& out_dir, bool no_trace) {
    ScenarioHandle handle;
    if (int rc = load_and_validate(scenario_path, overrides, handle); rc != kExitOk) return rc;

    std::vector<std::uint64_t> seeds;
    if (!seeds_text.empty()) {
        std::uint64_t lo = 0, hi = 0;
        if (!parse_seed_range(seeds_text, lo, hi)) {
            std::cerr << "error: --seeds expects A..B with A <= B\n";
            return kExitValidation;
        }
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else if (seed_opt) {
        seeds.push_back(*seed_opt);
    } else {
        seeds.push_back(uwbsim_scenario_seed(handle.s));
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << out_dir << "\n";
        return kExitRuntime;
    }

    // The effective configuration makes every result reproducible from the
    // output directory alone.
    {
        char* rendered = uwbsim_scenario_render(handle.s);
        std::ofstream cfg(std::filesystem::path(out_dir) / "effective_scenario.json");
        cfg << rendered << "\n";
        uwbsim_string_free(rendered);
    }

    std::vector<SeedOutcome> outcomes(seeds.size());
    std::mutex fs_mutex;
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(seeds.size()));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> cursor{0};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= seeds.size()) return;
                SeedOutcome& out = outcomes[i];
                out.seed = seeds[i];
                const auto seed_dir =
                    std::filesystem::path(out_dir) / ("seed_" + std::to_string(out.seed));
                {
                    std::lock_guard<std::mutex> lock(fs_mutex);
                    std::filesystem::create_directories(seed_dir);
                }
                const std::string trace_path = (seed_dir / "trace.csv").string();
                uwbsim_result* result = nullptr;
                const uwbsim_status st = uwbsim_run(
                    handle.s, out.seed, no_trace ? nullptr : trace_path.c_str(), &result);
                if (st != UWBSIM_OK) {
                    out.error = uwbsim_last_error();
                    return;
                }
                out.metrics = nlohmann::json::parse(uwbsim_result_metrics_json(result));
                std::ofstream mf(seed_dir / "metrics.json");
                mf << out.metrics.dump(2) << "\n";
                uwbsim_result_free(result);
                out.ok = true;
            }
        });
    }
    for (auto& t : pool) t.join();

    for (const auto& out : outcomes) {
        if (!out.ok) {
            std::cerr << "error: seed " << out.seed << ": " << out.error << "\n";
            return kExitRuntime;
        }
    }

    // Cross-seed aggregate.
    nlohmann::json aggregate;
    aggregate["scenario"] = scenario_path;
    aggregate["seeds"] = seeds;
    aggregate["flows"] = nlohmann::json::array();
    const auto& first_flows = outcomes.front().metrics["flows"];
    for (std::size_t f = 0; f < first_flows.size(); ++f) {
        std::vector<double> per, latency, delivered;
        for (const auto& out : outcomes) {
            const auto& flow = out.metrics["flows"][f];
            per.push_back(flow["per"].get<double>());
            latency.push_back(flow["latency_mean_ps"].get<double>());
            delivered.push_back(flow["delivered"].get<double>());
        }
        nlohmann::json jf;
        jf["name"] = first_flows[f]["name"];
        jf["per_mean"] = mean_of(per);
        jf["per_std"] = stddev_of(per);
        jf["latency_mean_ps"] = mean_of(latency);
        jf["latency_std_ps"] = stddev_of(latency);
        jf["delivered_mean"] = mean_of(delivered);
        aggregate["flows"].push_back(jf);
    }
    {
        std::vector<double> coll, throughput;
        for (const auto& out : outcomes) {
            coll.push_back(out.metrics["global"]["pulse_collisions"].get<double>());
            throughput.push_back(out.metrics["global"]["throughput_bps"].get<double>());
        }
        aggregate["global"]["pulse_collisions_mean"] = mean_of(coll);
        aggregate["global"]["throughput_bps_mean"] = mean_of(throughput);
    }
    {
        std::ofstream af(std::filesystem::path(out_dir) / "aggregate.json");
        af << aggregate.dump(2) << "\n";
    }

    for (const auto& out : outcomes) {
        std::printf("seed %llu:", static_cast<unsigned long long>(out.seed));
        for (const auto& flow : out.metrics["flows"]) {
            std::printf("  %s per=%.4g latency=%.4g us", flow["name"].get<std::string>().c_str(),
                        flow["per"].get<double>(),
                        flow["latency_mean_ps"].get<double>() / 1e6);
        }
        std::printf("\n");
    }
    if (seeds.size() > 1) {
        std::printf("aggregate over %zu seeds:\n", seeds.size());
        for (const auto& jf : aggregate["flows"]) {
            std::printf("  %s per=%.4g+-%.4g latency=%.4g us\n",
                        jf["name"].get<std::string>().c_str(), jf["per_mean"].get<double>(),
                        jf["per_std"].get<double>(), jf["latency_mean_ps"].get<double>() / 1e6);
        }
    }
    std::printf("results in %s\n", out_dir.c_str());
    return kExitOk;
}

int cmd_validate(const std::string& scenario_path, const std::vector<std::string>& overrides) {
    ScenarioHandle handle;
    return load_and_validate(scenario_path, overrides, handle);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pulse-level time-hopping impulse-radio UWB network simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string seeds_text;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed_opt;
    bool no_trace = false;

    auto* run = app.add_subcommand("run", "run a scenario for one or more seeds");
    run->add_option("scenario", scenario_path, "scenario file (JSON)")->required();
    auto* seed_flag = run->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { seed_opt = v; }, "single seed");
    run->add_option("--seeds", seeds_text, "inclusive seed range A..B")->excludes(seed_flag);
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_flag("--no-trace", no_trace, "skip per-event trace files");
    run->add_option("--set", overrides, "override a scenario key, dotted.path=value")
        ->take_all();

    auto* validate = app.add_subcommand("validate", "check a scenario and print all findings");
    validate->add_option("scenario", scenario_path, "scenario file (JSON)")->required();
    validate->add_option("--set", overrides, "override a scenario key, dotted.path=value")
        ->take_all();

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("run")) {
        return cmd_run(scenario_path, overrides, seed_opt, seeds_text, out_dir, no_trace);
    }
    return cmd_validate(scenario_path, overrides);
}
