#include "io/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace uwbsim {

namespace {

using nlohmann::json;

// Cursor over one JSON object. Every key access is recorded; finish() flags
// whatever was never consumed, which is how typos in the scenario file get
// caught instead of silently running with a default.
class Section {
public:
    Section(const json* j, std::string path, std::vector<ParseError>& errors)
        : j_(j), path_(std::move(path)), errors_(errors) {
        if (j_ && !j_->is_object()) {
            error("expected an object");
            j_ = nullptr;
        }
    }

    bool present() const { return j_ != nullptr; }
    const std::string& path() const { return path_; }

    void error(const std::string& message) { errors_.push_back({path_, message}); }
    void error_at(const std::string& key, const std::string& message) {
        errors_.push_back({path_ + "." + key, message});
    }

    bool has(const char* key) {
        if (!j_) return false;
        return j_->contains(key);
    }

    const json* take(const char* key) {
        if (!j_) return nullptr;
        seen_.insert(key);
        auto it = j_->find(key);
        return it == j_->end() ? nullptr : &*it;
    }

    double num(const char* key, double fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_number()) {
            error_at(key, "expected a number");
            return fallback;
        }
        return v->get<double>();
    }

    std::optional<double> num_opt(const char* key) {
        const json* v = take(key);
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            error_at(key, "expected a number");
            return std::nullopt;
        }
        return v->get<double>();
    }

    std::int64_t integer(const char* key, std::int64_t fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (v->is_number_integer() || v->is_number_unsigned()) return v->get<std::int64_t>();
        if (v->is_number_float()) {
            const double d = v->get<double>();
            if (d == std::floor(d)) return static_cast<std::int64_t>(d);
        }
        error_at(key, "expected an integer");
        return fallback;
    }

    std::uint64_t uinteger(const char* key, std::uint64_t fallback) {
        const std::int64_t v = integer(key, static_cast<std::int64_t>(fallback));
        if (v < 0) {
            error_at(key, "expected a non-negative integer");
            return fallback;
        }
        return static_cast<std::uint64_t>(v);
    }

    std::string str(const char* key, const std::string& fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_string()) {
            error_at(key, "expected a string");
            return fallback;
        }
        return v->get<std::string>();
    }

    bool boolean(const char* key, bool fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_boolean()) {
            error_at(key, "expected a boolean");
            return fallback;
        }
        return v->get<bool>();
    }

    Section child(const char* key) {
        return Section(take(key), path_ + "." + key, errors_);
    }

    const json* array(const char* key) {
        const json* v = take(key);
        if (v && !v->is_array()) {
            error_at(key, "expected an array");
            return nullptr;
        }
        return v;
    }

    // Duration in seconds that must land on whole ticks.
    SimTime ticks(const char* key, SimTime fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_number()) {
            error_at(key, "expected a number of seconds");
            return fallback;
        }
        const auto t = ticks_from_seconds(v->get<double>());
        if (!t) {
            error_at(key, "not representable as an integer number of picoseconds");
            return fallback;
        }
        return *t;
    }

    std::optional<SimTime> ticks_opt(const char* key) {
        if (!has(key)) {
            take(key);
            return std::nullopt;
        }
        return ticks(key, 0);
    }

    void finish() {
        if (!j_) return;
        for (auto it = j_->begin(); it != j_->end(); ++it) {
            if (!seen_.count(it.key())) {
                errors_.push_back({path_ + "." + it.key(), "unknown key"});
            }
        }
    }

private:
    const json* j_;
    std::string path_;
    std::vector<ParseError>& errors_;
    std::set<std::string> seen_;
};

double seconds_of(SimTime t) { return static_cast<double>(t) * 1e-12; }

std::uint32_t max_data_l_pdu(const Scenario& s) {
    std::uint32_t m = s.mac.header_bits;  // an ACK, if any
    for (const auto& f : s.flows) m = std::max(m, s.mac.header_bits + f.payload_bits);
    if (s.sensing) m = std::max(m, s.mac.header_bits + s.sensing->report_payload_bits);
    return std::max<std::uint32_t>(m, 1);
}

}  // namespace

const NodeSpec* Scenario::find_node(std::uint32_t id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

std::string ScenarioParseResult::errors_joined() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (i) out << '\n';
        out << errors[i].path << ": " << errors[i].message;
    }
    return out.str();
}

ScenarioParseResult parse_scenario(const nlohmann::json& doc, const std::string& base_dir) {
    ScenarioParseResult result;
    auto& errors = result.errors;
    if (!doc.is_object()) {
        errors.push_back({"$", "scenario document must be a JSON object"});
        return result;
    }

    Scenario s;
    Section root(&doc, "$", errors);

    {
        Section sim = root.child("sim");
        if (!sim.present()) {
            root.error("missing required section 'sim'");
        } else {
            s.duration = sim.ticks("duration_s", 0);
            if (s.duration <= 0) sim.error_at("duration_s", "must be a positive duration");
            s.seed = sim.uinteger("seed", 1);
            sim.finish();
        }
    }

    {
        Section ch = root.child("channel");
        auto& c = s.channel;
        if (ch.present()) {
            c.center_frequency_hz = ch.num("center_frequency_hz", c.center_frequency_hz);
            c.bandwidth_hz = ch.num("bandwidth_hz", c.bandwidth_hz);
            c.noise_temperature_k = ch.num("noise_temperature_k", c.noise_temperature_k);
            c.path_loss_exponent = ch.num("path_loss_exponent", c.path_loss_exponent);
            c.reference_distance_m = ch.num("reference_distance_m", c.reference_distance_m);
            c.delay_spread_s = ch.num("delay_spread_s", c.delay_spread_s);
            c.velocity_factor = ch.num("velocity_factor", c.velocity_factor);
            c.noise_figure = ch.num("noise_figure", c.noise_figure);
            s.interference_floor_w = ch.num_opt("interference_floor_w");
            if (c.center_frequency_hz <= 0) ch.error_at("center_frequency_hz", "must be > 0");
            if (c.bandwidth_hz <= 0) ch.error_at("bandwidth_hz", "must be > 0");
            if (c.noise_temperature_k < 0) ch.error_at("noise_temperature_k", "must be >= 0");
            if (c.path_loss_exponent < 1) ch.error_at("path_loss_exponent", "must be >= 1");
            if (c.reference_distance_m <= 0) ch.error_at("reference_distance_m", "must be > 0");
            if (c.delay_spread_s < 0) ch.error_at("delay_spread_s", "must be >= 0");
            if (c.velocity_factor <= 0) ch.error_at("velocity_factor", "must be > 0");
            if (c.noise_figure <= 0) ch.error_at("noise_figure", "must be > 0");
            if (s.interference_floor_w && *s.interference_floor_w <= 0) {
                ch.error_at("interference_floor_w", "must be > 0");
            }
            ch.finish();
        }
    }

    {
        Section radio = root.child("radio");
        auto& r = s.radio;
        if (radio.present()) {
            r.slot_ticks = radio.ticks("slot_s", r.slot_ticks);
            r.frame_ticks = radio.ticks("frame_s", r.frame_ticks);
            r.slots_per_frame =
                static_cast<std::uint32_t>(radio.uinteger("slots_per_frame", r.slots_per_frame));
            r.tx_power_w = radio.num("tx_power_w", r.tx_power_w);
            r.tx_gain = radio.num("tx_gain", r.tx_gain);
            r.rx_gain = radio.num("rx_gain", r.rx_gain);
            r.sensitivity_dbm = radio.num("sensitivity_dbm", r.sensitivity_dbm);
            radio.finish();
        }
        Section check(&doc, "$.radio", errors);
        if (r.slot_ticks <= 0) check.error_at("slot_s", "must be a positive duration");
        if (r.slots_per_frame < 1) check.error_at("slots_per_frame", "must be >= 1");
        if (r.slot_ticks > 0 && r.slots_per_frame >= 1 &&
            r.frame_ticks != r.slot_ticks * static_cast<SimTime>(r.slots_per_frame)) {
            check.error_at("frame_s", "frame must equal slots_per_frame * slot exactly");
        }
        if (r.tx_power_w <= 0) check.error_at("tx_power_w", "must be > 0");
        if (r.tx_gain <= 0) check.error_at("tx_gain", "must be > 0");
        if (r.rx_gain <= 0) check.error_at("rx_gain", "must be > 0");
        const auto spread = ticks_from_seconds(s.channel.delay_spread_s);
        if (spread && r.frame_ticks > r.slot_ticks &&
            *spread >= r.frame_ticks - r.slot_ticks) {
            errors.push_back({"$.channel.delay_spread_s",
                              "delay spread must be shorter than frame minus slot"});
        }
    }

    {
        Section mac = root.child("mac");
        auto& m = s.mac;
        if (mac.present()) {
            const std::string proto = mac.str("protocol", "unslotted-th");
            if (auto p = mac_protocol_from_string(proto)) {
                m.protocol = *p;
            } else {
                mac.error_at("protocol",
                             "unknown protocol '" + proto +
                                 "' (expected unslotted-th, slotted-th, reliable-unslotted-th "
                                 "or reliable-slotted-th)");
            }
            m.header_bits = static_cast<std::uint32_t>(mac.uinteger("header_bits", m.header_bits));
            if (auto v = mac.ticks_opt("retransmission_delay_s")) m.retransmission_delay = *v;
            m.retransmission_limit = static_cast<std::uint32_t>(
                mac.uinteger("retransmission_limit", m.retransmission_limit));
            if (auto v = mac.ticks_opt("mac_frame_s")) m.mac_frame_ticks = *v;
            m.allocation_cycle =
                static_cast<std::uint32_t>(mac.uinteger("allocation_cycle", 0));
            const json* alloc = mac.take("allocation");
            if (alloc) {
                if (!alloc->is_object()) {
                    mac.error_at("allocation", "expected an object of node id -> frame indices");
                } else {
                    for (auto it = alloc->begin(); it != alloc->end(); ++it) {
                        std::uint32_t node_id = 0;
                        try {
                            node_id = static_cast<std::uint32_t>(std::stoul(it.key()));
                        } catch (const std::exception&) {
                            mac.error_at("allocation", "node id key '" + it.key() +
                                                           "' is not an integer");
                            continue;
                        }
                        if (!it.value().is_array()) {
                            mac.error_at("allocation." + it.key(),
                                         "expected an array of frame indices");
                            continue;
                        }
                        std::vector<std::uint32_t> frames;
                        for (const auto& e : it.value()) {
                            if (!e.is_number_integer() && !e.is_number_unsigned()) {
                                mac.error_at("allocation." + it.key(),
                                             "frame indices must be integers");
                                continue;
                            }
                            frames.push_back(e.get<std::uint32_t>());
                        }
                        m.allocation[node_id] = std::move(frames);
                    }
                }
            }
            m.forced_data_loss_p = mac.num("forced_data_loss_p", m.forced_data_loss_p);
            m.doze = mac.boolean("doze", m.doze);
            mac.finish();
        }
        if (m.forced_data_loss_p < 0 || m.forced_data_loss_p > 1) {
            errors.push_back({"$.mac.forced_data_loss_p", "must be a probability in [0, 1]"});
        }
        if (is_reliable(m.protocol) && m.header_bits < 1) {
            errors.push_back(
                {"$.mac.header_bits", "reliable protocols need at least a 1-bit header (ACKs)"});
        }
        if (m.allocation_cycle == 0) {
            // Default: tight cycle over the highest allocated index.
            std::uint32_t max_index = 0;
            for (const auto& [id, frames] : m.allocation) {
                for (std::uint32_t f : frames) max_index = std::max(max_index, f + 1);
            }
            m.allocation_cycle = std::max<std::uint32_t>(max_index, 1);
        }
        for (const auto& [id, frames] : m.allocation) {
            for (std::uint32_t f : frames) {
                if (f >= m.allocation_cycle) {
                    errors.push_back({"$.mac.allocation." + std::to_string(id),
                                      "frame index " + std::to_string(f) +
                                          " outside allocation cycle of " +
                                          std::to_string(m.allocation_cycle)});
                }
            }
        }
    }

    {
        Section energy = root.child("energy");
        if (energy.present()) {
            const json* profiles = energy.take("profiles");
            if (profiles) {
                if (!profiles->is_object()) {
                    energy.error_at("profiles", "expected an object of named power profiles");
                } else {
                    for (auto it = profiles->begin(); it != profiles->end(); ++it) {
                        Section p(&it.value(), "$.energy.profiles." + it.key(), errors);
                        PowerProfile prof;
                        prof.e_tx_pulse_j = p.num("e_tx_pulse_j", prof.e_tx_pulse_j);
                        prof.e_rx_pulse_j = p.num("e_rx_pulse_j", prof.e_rx_pulse_j);
                        prof.p_idle_w = p.num("p_idle_w", prof.p_idle_w);
                        prof.p_sense_w = p.num("p_sense_w", prof.p_sense_w);
                        prof.p_sleep_w = p.num("p_sleep_w", prof.p_sleep_w);
                        if (prof.e_tx_pulse_j < 0 || prof.e_rx_pulse_j < 0 || prof.p_idle_w < 0 ||
                            prof.p_sense_w < 0 || prof.p_sleep_w < 0) {
                            p.error("power profile values must be non-negative");
                        }
                        if (prof.p_sleep_w > prof.p_idle_w) {
                            p.error("p_sleep_w must not exceed p_idle_w");
                        }
                        p.finish();
                        s.profiles[it.key()] = prof;
                    }
                }
            }
            energy.finish();
        }
        if (!s.profiles.count("default")) s.profiles["default"] = PowerProfile{};
    }

    {
        const json* nodes = root.array("nodes");
        if (!nodes || nodes->empty()) {
            errors.push_back({"$.nodes", "at least one node is required"});
        } else {
            std::map<std::uint32_t, std::size_t> first_seen;
            for (std::size_t i = 0; i < nodes->size(); ++i) {
                const std::string path = "$.nodes[" + std::to_string(i) + "]";
                Section n(&(*nodes)[i], path, errors);
                NodeSpec spec;
                spec.id = static_cast<std::uint32_t>(n.uinteger("id", 0));
                spec.position.x = n.num("x", 0.0);
                spec.position.y = n.num("y", 0.0);
                spec.position.z = n.num("z", 0.0);
                const std::string role = n.str("role", "sensor");
                if (role == "sensor") spec.role = NodeRole::Sensor;
                else if (role == "sink") spec.role = NodeRole::Sink;
                else n.error_at("role", "expected 'sensor' or 'sink'");
                spec.hop_slot = static_cast<std::uint32_t>(n.uinteger("ths", 0));
                spec.sensitivity_dbm = n.num_opt("sensitivity_dbm");
                spec.tx_power_w = n.num_opt("tx_power_w");
                spec.power_profile = n.str("power_profile", "default");
                n.finish();

                if (!std::isfinite(spec.position.x) || !std::isfinite(spec.position.y) ||
                    !std::isfinite(spec.position.z)) {
                    n.error("coordinates must be finite");
                }
                if (spec.hop_slot >= s.radio.slots_per_frame) {
                    n.error_at("ths", "hop slot " + std::to_string(spec.hop_slot) +
                                          " outside [0, " +
                                          std::to_string(s.radio.slots_per_frame) + ")");
                }
                if (spec.tx_power_w && *spec.tx_power_w <= 0) {
                    n.error_at("tx_power_w", "must be > 0");
                }
                if (!s.profiles.count(spec.power_profile)) {
                    n.error_at("power_profile",
                               "unknown power profile '" + spec.power_profile + "'");
                }
                auto [it, fresh] = first_seen.emplace(spec.id, i);
                if (!fresh) {
                    n.error_at("id", "duplicate node id " + std::to_string(spec.id) +
                                         " (already defined at $.nodes[" +
                                         std::to_string(it->second) + "])");
                }
                s.nodes.push_back(std::move(spec));
            }
            // Distinct radios cannot be co-located (the path loss model needs
            // a positive distance).
            for (std::size_t i = 0; i < s.nodes.size(); ++i) {
                for (std::size_t k = i + 1; k < s.nodes.size(); ++k) {
                    if (s.nodes[i].id != s.nodes[k].id &&
                        distance(s.nodes[i].position, s.nodes[k].position) == 0.0) {
                        errors.push_back({"$.nodes[" + std::to_string(k) + "]",
                                          "node " + std::to_string(s.nodes[k].id) +
                                              " is co-located with node " +
                                              std::to_string(s.nodes[i].id)});
                    }
                }
            }
        }
    }

    {
        const json* traffic = root.array("traffic");
        if (traffic) {
            for (std::size_t i = 0; i < traffic->size(); ++i) {
                const std::string path = "$.traffic[" + std::to_string(i) + "]";
                Section t(&(*traffic)[i], path, errors);
                FlowSpec f;
                f.name = t.str("name", "flow" + std::to_string(i));
                f.src = static_cast<std::uint32_t>(t.uinteger("src", 0));
                f.dst = static_cast<std::uint32_t>(t.uinteger("dst", 0));
                f.payload_bits = static_cast<std::uint32_t>(t.uinteger("payload_bits", 0));
                const bool has_period = t.has("period_s");
                const bool has_rate = t.has("rate_pps");
                if (has_period && has_rate) {
                    t.error("give either period_s or rate_pps, not both");
                }
                if (!has_period && !has_rate) {
                    t.error("one of period_s or rate_pps is required");
                }
                if (has_period) {
                    f.period_ticks = t.ticks("period_s", 0);
                } else if (has_rate) {
                    const double rate = t.num("rate_pps", 0.0);
                    if (rate <= 0) {
                        t.error_at("rate_pps", "must be > 0");
                    } else {
                        const auto p = ticks_from_seconds(1.0 / rate);
                        if (!p) {
                            t.error_at("rate_pps", "period not representable in picoseconds");
                        } else {
                            f.period_ticks = *p;
                        }
                    }
                }
                f.start = t.ticks("start_s", 0);
                f.stop = t.has("stop_s") ? t.ticks("stop_s", s.duration) : s.duration;
                t.finish();

                if (f.payload_bits < 1) t.error_at("payload_bits", "must be >= 1");
                if (f.period_ticks <= 0 && (has_period || has_rate)) {
                    t.error("emission period must be positive");
                }
                if (f.start < 0) t.error_at("start_s", "must be >= 0");
                if (f.stop <= f.start) t.error_at("stop_s", "must be after start_s");
                if (!s.find_node(f.src)) {
                    t.error_at("src", "unknown node id " + std::to_string(f.src));
                }
                if (!s.find_node(f.dst)) {
                    t.error_at("dst", "unknown node id " + std::to_string(f.dst));
                }
                if (f.src == f.dst) t.error("src and dst must differ");
                s.flows.push_back(std::move(f));
            }
        }
    }

    {
        Section sensing = root.child("sensing");
        if (sensing.present()) {
            SensingSpec spec;
            Section ph = sensing.child("phenomenon");
            if (ph.present()) {
                Phenomenon p;
                p.position.x = ph.num("x", 0.0);
                p.position.y = ph.num("y", 0.0);
                p.position.z = ph.num("z", 0.0);
                p.source_intensity = ph.num("source_intensity", 1.0);
                p.sampling_rate_hz = ph.num("sampling_rate_hz", 1.0);
                p.path_loss_exponent = ph.num("path_loss_exponent", 2.0);
                p.reference_distance_m = ph.num("reference_distance_m", 1.0);
                p.start = ph.ticks("start_s", 0);
                p.stop = ph.has("stop_s") ? ph.ticks("stop_s", s.duration) : s.duration;
                p.wave_velocity_mps = ph.num("wave_velocity_mps", 0.0);
                ph.finish();
                if (p.source_intensity <= 0) ph.error_at("source_intensity", "must be > 0");
                if (p.sampling_rate_hz <= 0) ph.error_at("sampling_rate_hz", "must be > 0");
                if (p.path_loss_exponent <= 0) ph.error_at("path_loss_exponent", "must be > 0");
                if (p.reference_distance_m <= 0) {
                    ph.error_at("reference_distance_m", "must be > 0");
                }
                if (p.wave_velocity_mps < 0) ph.error_at("wave_velocity_mps", "must be >= 0");
                if (p.stop <= p.start) ph.error_at("stop_s", "must be after start_s");
                const auto period = ticks_from_seconds(1.0 / p.sampling_rate_hz);
                if (!period || *period <= 0) {
                    ph.error_at("sampling_rate_hz", "period not representable in picoseconds");
                } else {
                    p.period_ticks = *period;
                }
                spec.phenomenon = p;
            }
            Section dev = sensing.child("device");
            if (dev.present()) {
                SensorDevice d;
                d.detection_threshold = dev.num("detection_threshold", 1e-6);
                d.false_positive_rate = dev.num("false_positive_rate", 0.0);
                d.false_negative_rate = dev.num("false_negative_rate", 0.0);
                d.sampling_rate_hz = dev.num(
                    "sampling_rate_hz",
                    spec.phenomenon ? spec.phenomenon->sampling_rate_hz : 1.0);
                dev.finish();
                if (d.detection_threshold <= 0) {
                    dev.error_at("detection_threshold", "must be > 0");
                }
                if (d.false_positive_rate < 0 || d.false_positive_rate > 1) {
                    dev.error_at("false_positive_rate", "must be a probability in [0, 1]");
                }
                if (d.false_negative_rate < 0 || d.false_negative_rate > 1) {
                    dev.error_at("false_negative_rate", "must be a probability in [0, 1]");
                }
                if (d.sampling_rate_hz <= 0) dev.error_at("sampling_rate_hz", "must be > 0");
                const auto period = ticks_from_seconds(1.0 / d.sampling_rate_hz);
                if (!period || *period <= 0) {
                    dev.error_at("sampling_rate_hz", "period not representable in picoseconds");
                } else {
                    d.period_ticks = *period;
                }
                spec.device = d;
            } else {
                sensing.error("missing required section 'device'");
            }
            spec.sink = static_cast<std::uint32_t>(sensing.uinteger("sink", 0));
            spec.report_payload_bits =
                static_cast<std::uint32_t>(sensing.uinteger("report_payload_bits", 64));
            spec.suppression_ticks = sensing.ticks("suppression_s", 0);
            sensing.finish();
            if (!s.find_node(spec.sink)) {
                sensing.error_at("sink", "unknown node id " + std::to_string(spec.sink));
            }
            if (spec.report_payload_bits < 1) {
                sensing.error_at("report_payload_bits", "must be >= 1");
            }
            s.sensing = std::move(spec);
        }
    }

    {
        s.ber_table_path = root.str("ber_table", "");
        if (s.ber_table_path.empty()) {
            errors.push_back({"$.ber_table", "path to the BER table file is required"});
        } else {
            std::filesystem::path p(s.ber_table_path);
            if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
            try {
                s.ber_table = BerTable::load_file(p.string());
            } catch (const std::exception& e) {
                errors.push_back({"$.ber_table", e.what()});
            }
        }
    }

    root.finish();

    // Cross-section constraints and derived values need a structurally sound
    // scenario; skip them when the basics already failed.
    if (!errors.empty()) return result;

    SimTime max_delay = 0;
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        for (std::size_t k = i + 1; k < s.nodes.size(); ++k) {
            const double d = distance(s.nodes[i].position, s.nodes[k].position);
            max_delay = std::max(max_delay, propagation_delay(d, s.channel));
        }
    }
    s.max_propagation_delay = max_delay;

    const SimTime spread = *ticks_from_seconds(s.channel.delay_spread_s);
    if (s.mac.retransmission_delay == 0) {
        // Default guarantees a clean-channel ACK beats the timeout: two
        // propagation legs, the ACK airtime, and a frame of slot alignment
        // per direction.
        const SimTime ack_airtime =
            static_cast<SimTime>(s.mac.header_bits) * s.radio.frame_ticks;
        s.mac.retransmission_delay =
            2 * max_delay + ack_airtime + 2 * (s.radio.frame_ticks + spread);
    }

    if (is_slotted(s.mac.protocol)) {
        if (s.mac.mac_frame_ticks <= 0) {
            errors.push_back(
                {"$.mac.mac_frame_s", "required for slotted protocols"});
        } else {
            if (s.mac.mac_frame_ticks % s.radio.frame_ticks != 0) {
                errors.push_back({"$.mac.mac_frame_s",
                                  "must be an integer multiple of the radio frame"});
            }
            const SimTime worst_airtime =
                static_cast<SimTime>(max_data_l_pdu(s)) * s.radio.frame_ticks;
            if (s.mac.mac_frame_ticks < worst_airtime) {
                errors.push_back({"$.mac.mac_frame_s",
                                  "shorter than the longest packet airtime of " +
                                      std::to_string(seconds_of(worst_airtime)) + " s"});
            }
        }
        auto needs_allocation = [&](std::uint32_t id, const std::string& why) {
            auto it = s.mac.allocation.find(id);
            if (it == s.mac.allocation.end() || it->second.empty()) {
                errors.push_back({"$.mac.allocation",
                                  "node " + std::to_string(id) + " " + why +
                                      " but has no allocated MAC frames"});
            }
        };
        for (const auto& f : s.flows) {
            needs_allocation(f.src, "sources traffic");
            if (is_reliable(s.mac.protocol)) needs_allocation(f.dst, "must acknowledge traffic");
        }
        if (s.sensing && s.sensing->phenomenon) {
            for (const auto& n : s.nodes) {
                if (n.role == NodeRole::Sensor) needs_allocation(n.id, "may report detections");
            }
            if (is_reliable(s.mac.protocol)) {
                needs_allocation(s.sensing->sink, "must acknowledge reports");
            }
        }
    }

    // Pulses below this level are not scheduled at all; the cutoff sits well
    // below both the thermal noise and the weakest decode threshold, so it
    // cannot change any reception decision that matters.
    if (s.interference_floor_w) {
        s.effective_floor_w = *s.interference_floor_w;
    } else {
        double min_sensitivity = std::numeric_limits<double>::infinity();
        for (const auto& n : s.nodes) min_sensitivity = std::min(min_sensitivity, s.sensitivity_w(n));
        s.effective_floor_w =
            0.01 * std::min(noise_power(s.channel) * s.channel.noise_figure, min_sensitivity);
    }

    if (errors.empty()) result.scenario = std::move(s);
    return result;
}

ScenarioParseResult parse_scenario_text(const std::string& text, const std::string& base_dir) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        ScenarioParseResult r;
        r.errors.push_back({"$", "not valid JSON"});
        return r;
    }
    return parse_scenario(doc, base_dir);
}

ScenarioParseResult load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ScenarioParseResult r;
        r.errors.push_back({"$", "cannot open scenario file: " + path});
        return r;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), std::filesystem::path(path).parent_path().string());
}

nlohmann::ordered_json render_scenario(const Scenario& s) {
    nlohmann::ordered_json j;
    j["sim"]["duration_s"] = seconds_of(s.duration);
    j["sim"]["seed"] = s.seed;

    auto& ch = j["channel"];
    ch["center_frequency_hz"] = s.channel.center_frequency_hz;
    ch["bandwidth_hz"] = s.channel.bandwidth_hz;
    ch["noise_temperature_k"] = s.channel.noise_temperature_k;
    ch["path_loss_exponent"] = s.channel.path_loss_exponent;
    ch["reference_distance_m"] = s.channel.reference_distance_m;
    ch["delay_spread_s"] = s.channel.delay_spread_s;
    ch["velocity_factor"] = s.channel.velocity_factor;
    ch["noise_figure"] = s.channel.noise_figure;
    if (s.interference_floor_w) ch["interference_floor_w"] = *s.interference_floor_w;

    auto& r = j["radio"];
    r["slot_s"] = seconds_of(s.radio.slot_ticks);
    r["frame_s"] = seconds_of(s.radio.frame_ticks);
    r["slots_per_frame"] = s.radio.slots_per_frame;
    r["tx_power_w"] = s.radio.tx_power_w;
    r["tx_gain"] = s.radio.tx_gain;
    r["rx_gain"] = s.radio.rx_gain;
    r["sensitivity_dbm"] = s.radio.sensitivity_dbm;

    auto& m = j["mac"];
    m["protocol"] = to_string(s.mac.protocol);
    m["header_bits"] = s.mac.header_bits;
    m["retransmission_delay_s"] = seconds_of(s.mac.retransmission_delay);
    m["retransmission_limit"] = s.mac.retransmission_limit;
    if (s.mac.mac_frame_ticks > 0) m["mac_frame_s"] = seconds_of(s.mac.mac_frame_ticks);
    m["allocation_cycle"] = s.mac.allocation_cycle;
    if (!s.mac.allocation.empty()) {
        auto& alloc = m["allocation"];
        for (const auto& [id, frames] : s.mac.allocation) {
            alloc[std::to_string(id)] = frames;
        }
    }
    m["forced_data_loss_p"] = s.mac.forced_data_loss_p;
    m["doze"] = s.mac.doze;

    auto& profiles = j["energy"]["profiles"];
    for (const auto& [name, p] : s.profiles) {
        auto& jp = profiles[name];
        jp["e_tx_pulse_j"] = p.e_tx_pulse_j;
        jp["e_rx_pulse_j"] = p.e_rx_pulse_j;
        jp["p_idle_w"] = p.p_idle_w;
        jp["p_sense_w"] = p.p_sense_w;
        jp["p_sleep_w"] = p.p_sleep_w;
    }

    j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : s.nodes) {
        nlohmann::ordered_json jn;
        jn["id"] = n.id;
        jn["x"] = n.position.x;
        jn["y"] = n.position.y;
        jn["z"] = n.position.z;
        jn["role"] = n.role == NodeRole::Sink ? "sink" : "sensor";
        jn["ths"] = n.hop_slot;
        if (n.sensitivity_dbm) jn["sensitivity_dbm"] = *n.sensitivity_dbm;
        if (n.tx_power_w) jn["tx_power_w"] = *n.tx_power_w;
        jn["power_profile"] = n.power_profile;
        j["nodes"].push_back(std::move(jn));
    }

    j["traffic"] = nlohmann::ordered_json::array();
    for (const auto& f : s.flows) {
        nlohmann::ordered_json jf;
        jf["name"] = f.name;
        jf["src"] = f.src;
        jf["dst"] = f.dst;
        jf["payload_bits"] = f.payload_bits;
        jf["period_s"] = seconds_of(f.period_ticks);
        jf["start_s"] = seconds_of(f.start);
        jf["stop_s"] = seconds_of(f.stop);
        j["traffic"].push_back(std::move(jf));
    }

    if (s.sensing) {
        auto& js = j["sensing"];
        if (s.sensing->phenomenon) {
            const auto& p = *s.sensing->phenomenon;
            auto& jp = js["phenomenon"];
            jp["x"] = p.position.x;
            jp["y"] = p.position.y;
            jp["z"] = p.position.z;
            jp["source_intensity"] = p.source_intensity;
            jp["sampling_rate_hz"] = p.sampling_rate_hz;
            jp["path_loss_exponent"] = p.path_loss_exponent;
            jp["reference_distance_m"] = p.reference_distance_m;
            jp["start_s"] = seconds_of(p.start);
            jp["stop_s"] = seconds_of(p.stop);
            jp["wave_velocity_mps"] = p.wave_velocity_mps;
        }
        auto& jd = js["device"];
        jd["detection_threshold"] = s.sensing->device.detection_threshold;
        jd["false_positive_rate"] = s.sensing->device.false_positive_rate;
        jd["false_negative_rate"] = s.sensing->device.false_negative_rate;
        jd["sampling_rate_hz"] = s.sensing->device.sampling_rate_hz;
        js["sink"] = s.sensing->sink;
        js["report_payload_bits"] = s.sensing->report_payload_bits;
        js["suppression_s"] = seconds_of(s.sensing->suppression_ticks);
    }

    j["ber_table"] = s.ber_table_path;
    return j;
}

std::optional<std::string> apply_override(nlohmann::json& doc, const std::string& dotted_key,
                                          const std::string& value) {
    if (dotted_key.empty()) return "empty override key";
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= dotted_key.size(); ++i) {
        if (i == dotted_key.size() || dotted_key[i] == '.') {
            parts.push_back(dotted_key.substr(start, i - start));
            start = i + 1;
        }
    }
    nlohmann::json* cursor = &doc;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        const std::string& part = parts[i];
        if (cursor->is_array()) {
            std::size_t index = 0;
            try {
                index = std::stoul(part);
            } catch (const std::exception&) {
                return "override '" + dotted_key + "': '" + part + "' is not an array index";
            }
            if (index >= cursor->size()) {
                return "override '" + dotted_key + "': index " + part + " out of range";
            }
            cursor = &(*cursor)[index];
        } else if (cursor->is_object()) {
            // Absent sections are created: overriding a defaulted key must
            // work on minimal documents. The strict parse still rejects keys
            // outside the schema.
            cursor = &(*cursor)[part];
            if (cursor->is_null()) *cursor = nlohmann::json::object();
        } else {
            return "override '" + dotted_key + "': '" + part + "' is not a container";
        }
    }
    nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value;  // treat as a bare string
    const std::string& leaf = parts.back();
    if (cursor->is_array()) {
        std::size_t index = 0;
        try {
            index = std::stoul(leaf);
        } catch (const std::exception&) {
            return "override '" + dotted_key + "': '" + leaf + "' is not an array index";
        }
        if (index >= cursor->size()) {
            return "override '" + dotted_key + "': index " + leaf + " out of range";
        }
        (*cursor)[index] = std::move(parsed);
    } else if (cursor->is_object()) {
        (*cursor)[leaf] = std::move(parsed);
    } else {
        return "override '" + dotted_key + "': parent is not a container";
    }
    return std::nullopt;
}

}  // namespace uwbsim
