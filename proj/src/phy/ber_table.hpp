#pragma once

#include <istream>
#include <string>
#include <vector>

namespace uwbsim {

/// Externally supplied SNR-to-bit-error-rate mapping. The table abstracts the
/// modulation, coding and receiver design: whatever produced it (baseband
/// simulation or measurement) is outside the simulator.
class BerTable {
public:
    struct Row {
        double snr_db;
        double ber;
    };

    BerTable() = default;
    explicit BerTable(std::vector<Row> rows);

    /// Parses the two-column `snr_db,ber` CSV (header row required, rows
    /// sorted by ascending SNR). Throws std::runtime_error with the offending
    /// line number on malformed input.
    static BerTable load_file(const std::string& path);
    static BerTable parse(std::istream& in, const std::string& origin);

    bool empty() const { return rows_.empty(); }
    std::size_t size() const { return rows_.size(); }
    const std::vector<Row>& rows() const { return rows_; }

    /// Bit error probability at the given SNR. Queries between rows
    /// interpolate linearly in log10(ber) (plain linear when a bracketing BER
    /// is zero); queries outside the table clamp to the first/last row.
    /// Throws std::logic_error on an empty table.
    double lookup(double snr_db) const;

private:
    std::vector<Row> rows_;
};

}  // namespace uwbsim
