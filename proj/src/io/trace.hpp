#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "core/event.hpp"
#include "core/sim_time.hpp"

namespace uwbsim {

enum class TraceEvent : std::uint8_t {
    MacEnqueue,
    MacTxStart,
    MacDeliver,
    MacDuplicate,
    MacForeign,
    MacAckRx,
    MacAckUnexpected,
    MacFailure,
    PhyLock,
    PhyDeliver,
    PhyDrop,
    PhyCollision,
    SensorSample,
    SensorReport,
    EnergyReport,
};

const char* to_string(TraceEvent e);
const char* to_string(Layer l);
bool trace_event_from_string(const std::string& s, TraceEvent& out);

// One line of the run trace. Unused fields stay at their sentinels and render
// as empty CSV cells; `detail` carries rare key=value extras (drop reasons,
// the energy breakdown) as a semicolon-separated list, never with commas.
struct TraceRecord {
    SimTime time = 0;
    std::uint32_t node = UINT32_MAX;
    Layer layer = Layer::Kernel;
    TraceEvent event = TraceEvent::MacEnqueue;
    std::uint64_t packet = UINT64_MAX;
    std::uint32_t src = UINT32_MAX;
    std::uint32_t dst = UINT32_MAX;
    std::int64_t seq = -1;
    std::int64_t attempt = -1;
    std::int64_t slot = -1;
    std::uint32_t flow = UINT32_MAX;
    double value = std::numeric_limits<double>::quiet_NaN();
    std::string detail;
};

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void emit(const TraceRecord& r) = 0;
};

/// Line-oriented CSV trace with a fixed header; field order is stable and the
/// output is byte-identical for identical runs.
class CsvTraceWriter final : public TraceSink {
public:
    explicit CsvTraceWriter(const std::string& path);
    ~CsvTraceWriter() override;

    void emit(const TraceRecord& r) override;
    void close();

    static const char* header();

private:
    std::ofstream out_;
    std::string buffer_;
};

/// Parses one CSV line back into a record (the header line must be skipped by
/// the caller). Throws std::runtime_error naming the line number on malformed
/// rows.
TraceRecord parse_trace_line(const std::string& line, std::size_t line_no);

std::string format_value(double v);

}  // namespace uwbsim
