#include "riskpipe/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "riskpipe/errors.hpp"

namespace riskpipe {

int CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

static std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open CSV file: " + path);

    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (!have_header) {
            // Strip a UTF-8 BOM if present.
            if (!cells.empty() && cells[0].size() >= 3 &&
                static_cast<unsigned char>(cells[0][0]) == 0xEF)
                cells[0].erase(0, 3);
            table.header = std::move(cells);
            have_header = true;
        } else {
            cells.resize(table.header.size());
            table.rows.push_back(std::move(cells));
        }
    }
    if (!have_header) throw EmptyInputError("empty CSV file: " + path);
    return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write CSV file: " + path);
    for (size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

double parse_cell(const std::string& cell) {
    size_t a = 0, b = cell.size();
    while (a < b && (cell[a] == ' ' || cell[a] == '\t')) ++a;
    while (b > a && (cell[b - 1] == ' ' || cell[b - 1] == '\t')) --b;
    if (a == b) return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    auto res = std::from_chars(cell.data() + a, cell.data() + b, v);
    if (res.ec != std::errc() || res.ptr != cell.data() + b)
        return std::numeric_limits<double>::quiet_NaN();
    return v;
}

std::string format_cell(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

}  // namespace riskpipe
