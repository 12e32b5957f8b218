#include "phy/ber_table.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uwbsim {

namespace {

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& what) {
    throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

BerTable::BerTable(std::vector<Row> rows) : rows_(std::move(rows)) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].ber < 0.0 || rows_[i].ber > 1.0) {
            throw std::runtime_error("BER table: ber out of [0, 1] at row " + std::to_string(i));
        }
        if (i > 0 && rows_[i].snr_db <= rows_[i - 1].snr_db) {
            throw std::runtime_error("BER table: snr_db not strictly increasing at row " +
                                     std::to_string(i));
        }
        if (i > 0 && rows_[i].ber > rows_[i - 1].ber) {
            throw std::runtime_error("BER table: ber increases with SNR at row " +
                                     std::to_string(i));
        }
    }
}

BerTable BerTable::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open BER table: " + path);
    return parse(in, path);
}

BerTable BerTable::parse(std::istream& in, const std::string& origin) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) fail(origin, 1, "missing header row");
    ++line_no;  // header consumed, content not interpreted

    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string snr_field, ber_field;
        if (!std::getline(ls, snr_field, ',') || !std::getline(ls, ber_field)) {
            fail(origin, line_no, "expected two comma-separated columns");
        }
        try {
            std::size_t used = 0;
            const double snr = std::stod(snr_field, &used);
            const double ber = std::stod(ber_field);
            rows.push_back({snr, ber});
        } catch (const std::exception&) {
            fail(origin, line_no, "cannot parse numeric fields: '" + line + "'");
        }
    }
    if (rows.empty()) fail(origin, line_no, "table has no data rows");
    try {
        return BerTable(std::move(rows));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(origin + ": " + e.what());
    }
}

double BerTable::lookup(double snr_db) const {
    if (rows_.empty()) throw std::logic_error("BER lookup on empty table");
    if (snr_db <= rows_.front().snr_db) return rows_.front().ber;
    if (snr_db >= rows_.back().snr_db) return rows_.back().ber;
    std::size_t hi = 1;
    while (rows_[hi].snr_db < snr_db) ++hi;
    const Row& a = rows_[hi - 1];
    const Row& b = rows_[hi];
    if (snr_db == b.snr_db) return b.ber;
    const double t = (snr_db - a.snr_db) / (b.snr_db - a.snr_db);
    if (a.ber <= 0.0 || b.ber <= 0.0) {
        return a.ber + t * (b.ber - a.ber);
    }
    return std::pow(10.0, std::log10(a.ber) + t * (std::log10(b.ber) - std::log10(a.ber)));
}

}  // namespace uwbsim
