#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "channel/propagation.hpp"
#include "core/sim_time.hpp"
#include "energy/ledger.hpp"
#include "mac/mac.hpp"
#include "phy/ber_table.hpp"
#include "phy/slots.hpp"
#include "sensing/sensing.hpp"

namespace uwbsim {

enum class NodeRole : std::uint8_t { Sensor, Sink };

struct NodeSpec {
    std::uint32_t id = 0;
    Position position;
    NodeRole role = NodeRole::Sensor;
    std::uint32_t hop_slot = 0;
    std::optional<double> sensitivity_dbm;  // overrides the radio default
    std::optional<double> tx_power_w;       // overrides the radio default
    std::string power_profile = "default";
};

struct RadioConfig {
    SimTime slot_ticks = 10'000;      // 10 ns
    SimTime frame_ticks = 80'000;     // 80 ns
    std::uint32_t slots_per_frame = 8;
    double tx_power_w = 1e-3;
    double tx_gain = 1.0;
    double rx_gain = 1.0;
    double sensitivity_dbm = -95.0;
};

struct FlowSpec {
    std::string name;
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint32_t payload_bits = 0;
    SimTime period_ticks = 0;
    SimTime start = 0;
    SimTime stop = 0;
};

struct SensingSpec {
    std::optional<Phenomenon> phenomenon;
    SensorDevice device;
    std::uint32_t sink = 0;
    std::uint32_t report_payload_bits = 64;
    SimTime suppression_ticks = 0;
};

struct Scenario {
    SimTime duration = 0;
    std::uint64_t seed = 1;
    ChannelConfig channel;
    std::optional<double> interference_floor_w;
    RadioConfig radio;
    MacConfig mac;
    std::map<std::string, PowerProfile> profiles;
    std::vector<NodeSpec> nodes;
    std::vector<FlowSpec> flows;
    std::optional<SensingSpec> sensing;
    std::string ber_table_path;

    // Filled in during validation.
    BerTable ber_table;
    double effective_floor_w = 0.0;
    SimTime max_propagation_delay = 0;

    const NodeSpec* find_node(std::uint32_t id) const;
    ThsConfig ths_for(const NodeSpec& n) const {
        return ThsConfig{radio.slot_ticks, radio.frame_ticks, radio.slots_per_frame, n.hop_slot};
    }
    double sensitivity_w(const NodeSpec& n) const {
        return watts_from_dbm(n.sensitivity_dbm.value_or(radio.sensitivity_dbm));
    }
    double node_tx_power_w(const NodeSpec& n) const {
        return n.tx_power_w.value_or(radio.tx_power_w);
    }
};

struct ParseError {
    std::string path;
    std::string message;
};

struct ScenarioParseResult {
    std::optional<Scenario> scenario;
    std::vector<ParseError> errors;

    bool ok() const { return errors.empty() && scenario.has_value(); }
    std::string errors_joined() const;
};

/// Parses and fully validates a scenario document. Unknown keys are rejected
/// and every violated constraint is reported with its field path; nothing
/// fails fast, so one run surfaces all configuration mistakes. `base_dir`
/// anchors relative file references (the BER table).
ScenarioParseResult parse_scenario(const nlohmann::json& doc, const std::string& base_dir);
ScenarioParseResult parse_scenario_text(const std::string& text, const std::string& base_dir);
ScenarioParseResult load_scenario_file(const std::string& path);

/// Canonical JSON form of a validated scenario, with all defaults
/// materialized. parse(render(s)) reproduces s.
nlohmann::ordered_json render_scenario(const Scenario& s);

/// Applies one `dotted.key=value` override onto a raw scenario document.
/// The value string is interpreted as JSON when it parses, as a string
/// otherwise. Returns an error message when the path cannot be navigated.
std::optional<std::string> apply_override(nlohmann::json& doc, const std::string& dotted_key,
                                          const std::string& value);

}  // namespace uwbsim
