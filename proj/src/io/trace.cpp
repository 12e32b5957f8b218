#include "io/trace.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace uwbsim {

namespace {

constexpr std::array<const char*, 15> kEventNames = {
    "mac-enqueue",    "mac-tx-start", "mac-deliver",      "mac-duplicate", "mac-foreign",
    "mac-ack-rx",     "mac-ack-unexpected", "mac-failure", "phy-lock",      "phy-deliver",
    "phy-drop",       "phy-collision", "sensor-sample",   "sensor-report", "energy-report",
};

}  // namespace

const char* to_string(TraceEvent e) { return kEventNames[static_cast<std::size_t>(e)]; }

bool trace_event_from_string(const std::string& s, TraceEvent& out) {
    for (std::size_t i = 0; i < kEventNames.size(); ++i) {
        if (s == kEventNames[i]) {
            out = static_cast<TraceEvent>(i);
            return true;
        }
    }
    return false;
}

const char* to_string(Layer l) {
    switch (l) {
        case Layer::Kernel: return "kernel";
        case Layer::Phy: return "phy";
        case Layer::Mac: return "mac";
        case Layer::Sensor: return "sensor";
        case Layer::App: return "app";
    }
    return "?";
}

std::string format_value(double v) {
    char buf[40];
    const double r = std::nearbyint(v);
    if (r == v && std::fabs(v) < 9.0e15) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.12g", v);
    }
    return buf;
}

const char* CsvTraceWriter::header() {
    return "time_ps,node,layer,event,packet,src,dst,seq,attempt,slot,flow,value,detail";
}

CsvTraceWriter::CsvTraceWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open trace file for writing: " + path);
    out_ << header() << '\n';
    buffer_.reserve(256);
}

CsvTraceWriter::~CsvTraceWriter() { close(); }

void CsvTraceWriter::close() {
    if (out_.is_open()) out_.close();
}

void CsvTraceWriter::emit(const TraceRecord& r) {
    buffer_.clear();
    char num[32];
    auto add_i64 = [&](std::int64_t v, bool present) {
        if (present) {
            std::snprintf(num, sizeof num, "%" PRId64, v);
            buffer_ += num;
        }
        buffer_ += ',';
    };
    std::snprintf(num, sizeof num, "%" PRId64, r.time);
    buffer_ += num;
    buffer_ += ',';
    add_i64(r.node, r.node != UINT32_MAX);
    buffer_ += to_string(r.layer);
    buffer_ += ',';
    buffer_ += to_string(r.event);
    buffer_ += ',';
    add_i64(static_cast<std::int64_t>(r.packet), r.packet != UINT64_MAX);
    add_i64(r.src, r.src != UINT32_MAX);
    add_i64(r.dst, r.dst != UINT32_MAX);
    add_i64(r.seq, r.seq >= 0);
    add_i64(r.attempt, r.attempt >= 0);
    add_i64(r.slot, r.slot >= 0);
    add_i64(r.flow, r.flow != UINT32_MAX);
    if (!std::isnan(r.value)) buffer_ += format_value(r.value);
    buffer_ += ',';
    buffer_ += r.detail;
    buffer_ += '\n';
    out_ << buffer_;
}

TraceRecord parse_trace_line(const std::string& line, std::size_t line_no) {
    std::array<std::string, 13> fields;
    std::size_t field = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            if (field >= fields.size()) {
                throw std::runtime_error("trace line " + std::to_string(line_no) +
                                         ": too many fields");
            }
            fields[field++] = line.substr(start, i - start);
            start = i + 1;
        }
    }
    if (field != fields.size()) {
        throw std::runtime_error("trace line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(fields.size()) + " fields, got " +
                                 std::to_string(field));
    }

    TraceRecord r;
    try {
        r.time = std::stoll(fields[0]);
        if (!fields[1].empty()) r.node = static_cast<std::uint32_t>(std::stoul(fields[1]));
        const std::string& layer = fields[2];
        if (layer == "phy") r.layer = Layer::Phy;
        else if (layer == "mac") r.layer = Layer::Mac;
        else if (layer == "sensor") r.layer = Layer::Sensor;
        else if (layer == "app") r.layer = Layer::App;
        else if (layer == "kernel") r.layer = Layer::Kernel;
        else throw std::runtime_error("unknown layer '" + layer + "'");
        if (!trace_event_from_string(fields[3], r.event)) {
            throw std::runtime_error("unknown event '" + fields[3] + "'");
        }
        if (!fields[4].empty()) r.packet = std::stoull(fields[4]);
        if (!fields[5].empty()) r.src = static_cast<std::uint32_t>(std::stoul(fields[5]));
        if (!fields[6].empty()) r.dst = static_cast<std::uint32_t>(std::stoul(fields[6]));
        if (!fields[7].empty()) r.seq = std::stoll(fields[7]);
        if (!fields[8].empty()) r.attempt = std::stoll(fields[8]);
        if (!fields[9].empty()) r.slot = std::stoll(fields[9]);
        if (!fields[10].empty()) r.flow = static_cast<std::uint32_t>(std::stoul(fields[10]));
        if (!fields[11].empty()) r.value = std::stod(fields[11]);
        r.detail = fields[12];
    } catch (const std::invalid_argument&) {
        throw std::runtime_error("trace line " + std::to_string(line_no) + ": malformed field");
    } catch (const std::out_of_range&) {
        throw std::runtime_error("trace line " + std::to_string(line_no) + ": field out of range");
    }
    return r;
}

}  // namespace uwbsim
