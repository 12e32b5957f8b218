#include "uwbsim.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>

#include "io/metrics.hpp"
#include "io/scenario.hpp"
#include "sim/simulation.hpp"

using namespace uwbsim;

namespace {

thread_local std::string t_last_error;

void set_error(const std::string& msg) { t_last_error = msg; }

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct uwbsim_scenario {
    nlohmann::json doc;
    std::string base_dir;
    std::string errors;
    std::optional<Scenario> validated;
    bool dirty = true;  // doc changed since the last validation

    uwbsim_status revalidate() {
        ScenarioParseResult result = parse_scenario(doc, base_dir);
        errors = result.errors_joined();
        dirty = false;
        if (result.ok()) {
            validated = std::move(result.scenario);
            return UWBSIM_OK;
        }
        validated.reset();
        set_error(errors);
        return UWBSIM_ERR_VALIDATION;
    }

    uwbsim_status ensure_validated() {
        if (dirty) return revalidate();
        if (!validated) {
            set_error(errors);
            return UWBSIM_ERR_VALIDATION;
        }
        return UWBSIM_OK;
    }
};

struct uwbsim_result {
    std::string metrics_json;
};

extern "C" {

const char* uwbsim_version(void) { return "1.0.0"; }

const char* uwbsim_last_error(void) { return t_last_error.c_str(); }

uwbsim_status uwbsim_scenario_load_file(const char* path, uwbsim_scenario** out) {
    if (!path || !out) {
        set_error("null argument");
        return UWBSIM_ERR_INVALID_ARGUMENT;
    }
    *out = nullptr;
    std::ifstream in(path);
    if (!in) {
        set_error(std::string("cannot open scenario file: ") + path);
        return UWBSIM_ERR_IO;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        set_error(std::string(path) + ": not valid JSON");
        return UWBSIM_ERR_PARSE;
    }
    auto* s = new uwbsim_scenario;
    s->doc = std::move(doc);
    s->base_dir = std::filesystem::path(path).parent_path().string();
    *out = s;
    return UWBSIM_OK;
}

uwbsim_status uwbsim_scenario_load_string(const char* text, const char* base_dir,
                                          uwbsim_scenario** out) {
    if (!text || !out) {
        set_error("null argument");
        return UWBSIM_ERR_INVALID_ARGUMENT;
    }
    *out = nullptr;
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        set_error("not valid JSON");
        return UWBSIM_ERR_PARSE;
    }
    auto* s = new uwbsim_scenario;
    s->doc = std::move(doc);
    s->base_dir = base_dir ? base_dir : "";
    *out = s;
    return UWBSIM_OK;
}

uwbsim_status uwbsim_scenario_set(uwbsim_scenario* s, const char* dotted_key, const char* value) {
    if (!s || !dotted_key || !value) {
        set_error("null argument");
        return UWBSIM_ERR_INVALID_ARGUMENT;
    }
    if (auto err = apply_override(s->doc, dotted_key, value)) {
        set_error(*err);
        return UWBSIM_ERR_INVALID_ARGUMENT;
    }
    s->dirty = true;
    return UWBSIM_OK;
}

uwbsim_status uwbsim_scenario_validate(uwbsim_scenario* s) {
    if (!s) {
        set_error("null argument");
        return UWBSIM_ERR_INVALID_ARGUMENT;
    }
    return s->revalidate();
}

const char* uwbsim_scenario_errors(const uwbsim_scenario* s) {
    return s ? s->errors.c_str() : "";
}

char* uwbsim_scenario_render(uwbsim_scenario* s) {
    if (!s || s->ensure_validated() != UWBSIM_OK) return nullptr;
    return dup_string(render_scenario(*s->validated).dump(2));
}

uint64_t uwbsim_scenario_seed(uwbsim_scenario* s) {
    if (!s || s->ensure_validated() != UWBSIM_OK) return 0;
    return s->validated->seed;
}

uwbsim_status uwbsim_run(uwbsim_scenario* s, uint64_t seed, const char* trace_path,
                         uwbsim_result** out) {
    if (!s || !out) {
        set_error("null argument");
        return UWBSIM_ERR_INVALID_ARGUMENT;
    }
    *out = nullptr;
    const uwbsim_status st = s->ensure_validated();
    if (st != UWBSIM_OK) return st;
    try {
        const MetricsSummary metrics =
            run_scenario(*s->validated, seed, trace_path ? trace_path : "");
        auto* r = new uwbsim_result;
        r->metrics_json = metrics_to_json(metrics);
        *out = r;
        return UWBSIM_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return UWBSIM_ERR_RUNTIME;
    }
}

const char* uwbsim_result_metrics_json(const uwbsim_result* r) {
    return r ? r->metrics_json.c_str() : "";
}

void uwbsim_scenario_free(uwbsim_scenario* s) { delete s; }

void uwbsim_result_free(uwbsim_result* r) { delete r; }

void uwbsim_string_free(char* s) { delete[] s; }

}  // extern "C"
