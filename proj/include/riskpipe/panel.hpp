#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "riskpipe/date.hpp"
#include "riskpipe/errors.hpp"

namespace riskpipe {

// Missing observations are carried as quiet NaN and propagated, never
// zero-filled.
inline double missing() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

using Series = std::vector<double>;

enum class ColumnRole {
    price,
    high,
    low,
    volume,
    market_cap,
    ret,
    liquidity,
    turnover,
    vol_proxy,
    resid_vol,
    pc,
    target,
    feature,
    label,
};

std::string to_string(ColumnRole role);
ColumnRole role_from_string(const std::string& s);

struct ColumnMeta {
    std::string name;
    std::string asset;  // empty = not tied to a single asset
    ColumnRole role = ColumnRole::feature;
};

enum class AlignPolicy { inner, united };

// Date-indexed numeric table. Rows are strictly increasing calendar days,
// columns carry unique names. Immutable after construction.
class Panel {
public:
    Panel() = default;
    Panel(std::vector<Date> dates, std::vector<ColumnMeta> columns, Eigen::MatrixXd values);

    size_t n_rows() const { return dates_.size(); }
    size_t n_cols() const { return columns_.size(); }

    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<ColumnMeta>& columns() const { return columns_; }
    const Eigen::MatrixXd& values() const { return values_; }

    bool has_column(const std::string& name) const;
    size_t column_index(const std::string& name) const;  // throws LookupError
    const ColumnMeta& column(size_t i) const { return columns_.at(i); }

    Series col(const std::string& name) const;
    Series col(size_t idx) const;
    std::vector<std::string> column_names() const;
    std::vector<std::string> columns_with_role(ColumnRole role) const;

    // New panel with the given columns only (same dates).
    Panel select(const std::vector<std::string>& names) const;

    // New panel with one extra column appended.
    Panel with_column(const ColumnMeta& meta, const Series& values) const;

    // Selected columns shifted down by `days`; names suffixed "_lag<days>".
    // Output contains only the lagged columns.
    Panel lag_columns(const std::vector<std::string>& names, int days) const;

    static Panel align(const std::vector<Panel>& panels, AlignPolicy policy);

    // Reads one asset CSV (header: date,open,high,low,close,volume,market_cap;
    // date and close mandatory). Columns come out prefixed "<ASSET>_".
    static Panel load_asset_csv(const std::string& path, const std::string& asset);

    void write_csv(const std::string& path) const;

    // Generic reader for panels written by write_csv (first column: date).
    static Panel read_csv(const std::string& path);

private:
    void validate() const;

    std::vector<Date> dates_;
    std::vector<ColumnMeta> columns_;
    Eigen::MatrixXd values_;  // n_rows x n_cols
};

}  // namespace riskpipe
