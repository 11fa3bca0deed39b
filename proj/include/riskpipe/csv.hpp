#pragma once

#include <string>
#include <vector>

namespace riskpipe {

// Minimal CSV support for the fixed schemas this project reads and writes:
// comma separated, no quoting, '.' decimal point, empty cell = missing.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

// Strict numeric parse; anything unparseable maps to NaN (missing).
double parse_cell(const std::string& cell);

// Round-trip-exact formatting for doubles; empty string for missing.
std::string format_cell(double v);

}  // namespace riskpipe
