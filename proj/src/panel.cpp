#include "riskpipe/panel.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "riskpipe/csv.hpp"

namespace riskpipe {

std::string to_string(ColumnRole role) {
    switch (role) {
        case ColumnRole::price: return "price";
        case ColumnRole::high: return "high";
        case ColumnRole::low: return "low";
        case ColumnRole::volume: return "volume";
        case ColumnRole::market_cap: return "market_cap";
        case ColumnRole::ret: return "return";
        case ColumnRole::liquidity: return "liquidity";
        case ColumnRole::turnover: return "turnover";
        case ColumnRole::vol_proxy: return "vol_proxy";
        case ColumnRole::resid_vol: return "resid_vol";
        case ColumnRole::pc: return "pc";
        case ColumnRole::target: return "target";
        case ColumnRole::feature: return "feature";
        case ColumnRole::label: return "label";
    }
    throw DomainError("unknown column role");
}

ColumnRole role_from_string(const std::string& s) {
    static const std::map<std::string, ColumnRole> table = {
        {"price", ColumnRole::price},       {"high", ColumnRole::high},
        {"low", ColumnRole::low},           {"volume", ColumnRole::volume},
        {"market_cap", ColumnRole::market_cap}, {"return", ColumnRole::ret},
        {"liquidity", ColumnRole::liquidity},   {"turnover", ColumnRole::turnover},
        {"vol_proxy", ColumnRole::vol_proxy},   {"resid_vol", ColumnRole::resid_vol},
        {"pc", ColumnRole::pc},             {"target", ColumnRole::target},
        {"feature", ColumnRole::feature},   {"label", ColumnRole::label},
    };
    auto it = table.find(s);
    if (it == table.end()) throw DomainError("unknown column role '" + s + "'");
    return it->second;
}

Panel::Panel(std::vector<Date> dates, std::vector<ColumnMeta> columns, Eigen::MatrixXd values)
    : dates_(std::move(dates)), columns_(std::move(columns)), values_(std::move(values)) {
    validate();
}

void Panel::validate() const {
    if (values_.rows() != static_cast<Eigen::Index>(dates_.size()) ||
        values_.cols() != static_cast<Eigen::Index>(columns_.size()))
        throw IntegrityError("panel value matrix does not match dates x columns");
    for (size_t i = 1; i < dates_.size(); ++i)
        if (!(dates_[i - 1] < dates_[i]))
            throw IntegrityError("panel dates not strictly increasing at " +
                                 dates_[i].to_string());
    std::unordered_set<std::string> seen;
    for (const auto& c : columns_)
        if (!seen.insert(c.name).second)
            throw IntegrityError("duplicate column name '" + c.name + "'");
}

bool Panel::has_column(const std::string& name) const {
    for (const auto& c : columns_)
        if (c.name == name) return true;
    return false;
}

size_t Panel::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name) return i;
    throw LookupError("unknown column '" + name + "'");
}

Series Panel::col(const std::string& name) const { return col(column_index(name)); }

Series Panel::col(size_t idx) const {
    if (idx >= n_cols()) throw LookupError("column index out of range");
    Series out(n_rows());
    for (size_t t = 0; t < n_rows(); ++t) out[t] = values_(t, idx);
    return out;
}

std::vector<std::string> Panel::column_names() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
}

std::vector<std::string> Panel::columns_with_role(ColumnRole role) const {
    std::vector<std::string> out;
    for (const auto& c : columns_)
        if (c.role == role) out.push_back(c.name);
    return out;
}

Panel Panel::select(const std::vector<std::string>& names) const {
    std::vector<ColumnMeta> cols;
    Eigen::MatrixXd vals(n_rows(), names.size());
    for (size_t j = 0; j < names.size(); ++j) {
        size_t src = column_index(names[j]);
        cols.push_back(columns_[src]);
        vals.col(j) = values_.col(src);
    }
    return Panel(dates_, std::move(cols), std::move(vals));
}

Panel Panel::with_column(const ColumnMeta& meta, const Series& values) const {
    if (values.size() != n_rows())
        throw IntegrityError("column '" + meta.name + "' length does not match panel rows");
    std::vector<ColumnMeta> cols = columns_;
    cols.push_back(meta);
    Eigen::MatrixXd vals(n_rows(), n_cols() + 1);
    vals.leftCols(n_cols()) = values_;
    for (size_t t = 0; t < n_rows(); ++t) vals(t, n_cols()) = values[t];
    return Panel(dates_, std::move(cols), std::move(vals));
}

Panel Panel::lag_columns(const std::vector<std::string>& names, int days) const {
    if (days < 1) throw ParameterError("lag days must be >= 1");
    std::vector<ColumnMeta> cols;
    Eigen::MatrixXd vals(n_rows(), names.size());
    for (size_t j = 0; j < names.size(); ++j) {
        size_t src = column_index(names[j]);
        ColumnMeta meta = columns_[src];
        meta.name += "_lag" + std::to_string(days);
        cols.push_back(meta);
        for (Eigen::Index t = 0; t < values_.rows(); ++t)
            vals(t, j) = t >= days ? values_(t - days, src) : missing();
    }
    return Panel(dates_, std::move(cols), std::move(vals));
}

Panel Panel::align(const std::vector<Panel>& panels, AlignPolicy policy) {
    if (panels.empty()) throw EmptyInputError("align: no panels given");

    std::set<int> serials;
    if (policy == AlignPolicy::inner) {
        for (Date d : panels[0].dates()) serials.insert(d.serial());
        for (size_t i = 1; i < panels.size(); ++i) {
            std::set<int> keep;
            for (Date d : panels[i].dates())
                if (serials.count(d.serial())) keep.insert(d.serial());
            serials.swap(keep);
        }
    } else {
        for (const auto& p : panels)
            for (Date d : p.dates()) serials.insert(d.serial());
    }

    std::vector<Date> dates;
    dates.reserve(serials.size());
    std::unordered_map<int, size_t> row_of;
    for (int s : serials) {
        row_of[s] = dates.size();
        dates.emplace_back(s);
    }

    std::vector<ColumnMeta> cols;
    std::unordered_set<std::string> seen;
    size_t total_cols = 0;
    for (const auto& p : panels) total_cols += p.n_cols();
    Eigen::MatrixXd vals = Eigen::MatrixXd::Constant(dates.size(), total_cols, missing());

    size_t j = 0;
    for (const auto& p : panels) {
        for (size_t c = 0; c < p.n_cols(); ++c, ++j) {
            if (!seen.insert(p.columns()[c].name).second)
                throw IntegrityError("column name collision on align: '" +
                                     p.columns()[c].name + "'");
            cols.push_back(p.columns()[c]);
            for (size_t t = 0; t < p.n_rows(); ++t) {
                auto it = row_of.find(p.dates()[t].serial());
                if (it != row_of.end()) vals(it->second, j) = p.values()(t, c);
            }
        }
    }
    return Panel(std::move(dates), std::move(cols), std::move(vals));
}

Panel Panel::load_asset_csv(const std::string& path, const std::string& asset) {
    CsvTable table = riskpipe::read_csv(path);
    if (table.rows.empty()) throw EmptyInputError("no data rows in " + path);

    const int date_col = table.column("date");
    const int close_col = table.column("close");
    if (date_col < 0 || close_col < 0)
        throw SchemaError("CSV " + path + " must contain 'date' and 'close' headers");

    struct Field {
        const char* header;
        const char* suffix;
        ColumnRole role;
    };
    static const Field fields[] = {
        {"open", "open", ColumnRole::price},     {"high", "high", ColumnRole::high},
        {"low", "low", ColumnRole::low},         {"close", "close", ColumnRole::price},
        {"volume", "volume", ColumnRole::volume},
        {"market_cap", "mcap", ColumnRole::market_cap},
    };

    std::vector<std::pair<int, ColumnMeta>> present;
    for (const auto& f : fields) {
        int idx = table.column(f.header);
        if (idx >= 0)
            present.push_back({idx, ColumnMeta{asset + "_" + f.suffix, asset, f.role}});
    }

    std::vector<std::pair<Date, size_t>> order;
    order.reserve(table.rows.size());
    for (size_t r = 0; r < table.rows.size(); ++r)
        order.push_back({Date::parse(table.rows[r][date_col]), r});
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t i = 1; i < order.size(); ++i)
        if (order[i].first == order[i - 1].first)
            throw IntegrityError("duplicate date " + order[i].first.to_string() + " in " + path);

    std::vector<Date> dates;
    dates.reserve(order.size());
    Eigen::MatrixXd vals(order.size(), present.size());
    for (size_t t = 0; t < order.size(); ++t) {
        dates.push_back(order[t].first);
        const auto& row = table.rows[order[t].second];
        for (size_t j = 0; j < present.size(); ++j)
            vals(t, j) = parse_cell(row[present[j].first]);
    }

    std::vector<ColumnMeta> cols;
    for (auto& [idx, meta] : present) cols.push_back(meta);
    return Panel(std::move(dates), std::move(cols), std::move(vals));
}

Panel Panel::read_csv(const std::string& path) {
    CsvTable table = riskpipe::read_csv(path);
    if (table.header.empty() || table.header[0] != "date")
        throw SchemaError("panel CSV " + path + " must start with a 'date' column");

    std::vector<ColumnMeta> cols;
    for (size_t j = 1; j < table.header.size(); ++j)
        cols.push_back(ColumnMeta{table.header[j], "", ColumnRole::feature});

    std::vector<Date> dates;
    Eigen::MatrixXd vals(table.rows.size(), cols.size());
    for (size_t t = 0; t < table.rows.size(); ++t) {
        dates.push_back(Date::parse(table.rows[t][0]));
        for (size_t j = 0; j < cols.size(); ++j) vals(t, j) = parse_cell(table.rows[t][j + 1]);
    }
    return Panel(std::move(dates), std::move(cols), std::move(vals));
}

void Panel::write_csv(const std::string& path) const {
    CsvTable table;
    table.header.push_back("date");
    for (const auto& c : columns_) table.header.push_back(c.name);
    table.rows.reserve(n_rows());
    for (size_t t = 0; t < n_rows(); ++t) {
        std::vector<std::string> row;
        row.reserve(n_cols() + 1);
        row.push_back(dates_[t].to_string());
        for (size_t j = 0; j < n_cols(); ++j) row.push_back(format_cell(values_(t, j)));
        table.rows.push_back(std::move(row));
    }
    riskpipe::write_csv(path, table);
}

}  // namespace riskpipe
