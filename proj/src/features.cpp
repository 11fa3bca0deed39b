#include "riskpipe/features.hpp"

#include <cmath>

#include "riskpipe/garch.hpp"
#include "riskpipe/stats.hpp"

namespace riskpipe {

Series log_returns(const Series& price) {
    Series out(price.size(), missing());
    for (size_t t = 0; t < price.size(); ++t) {
        if (!is_missing(price[t]) && price[t] <= 0.0)
            throw DomainError("nonpositive price at index " + std::to_string(t));
        if (t == 0) continue;
        if (!is_missing(price[t]) && !is_missing(price[t - 1]))
            out[t] = std::log(price[t] / price[t - 1]);
    }
    return out;
}

Series amihud(const Series& returns, const Series& dollar_volume) {
    if (returns.size() != dollar_volume.size())
        throw ShapeError("amihud: series lengths differ");
    Series out(returns.size(), missing());
    for (size_t t = 0; t < returns.size(); ++t) {
        const double dv = dollar_volume[t];
        if (!is_missing(dv) && dv < 0.0)
            throw DomainError("negative dollar volume at index " + std::to_string(t));
        if (is_missing(returns[t]) || is_missing(dv) || dv == 0.0) continue;
        out[t] = std::abs(returns[t]) / dv;
    }
    return out;
}

Series turnover(const Series& dollar_volume, const std::optional<Series>& market_cap,
                int fallback_window) {
    size_t n_obs = 0;
    for (double v : dollar_volume) {
        if (!is_missing(v) && v < 0.0) throw DomainError("negative volume in turnover input");
        if (!is_missing(v)) ++n_obs;
    }
    if (market_cap) {
        if (market_cap->size() != dollar_volume.size())
            throw ShapeError("turnover: cap series length differs");
        for (double c : *market_cap)
            if (!is_missing(c) && c < 0.0) throw DomainError("negative market cap");
    }
    if (n_obs == 0) throw EmptyInputError("turnover: all-missing volume input");

    Series out(dollar_volume.size(), missing());
    if (market_cap) {
        for (size_t t = 0; t < out.size(); ++t) {
            const double dv = dollar_volume[t], cap = (*market_cap)[t];
            if (is_missing(dv) || is_missing(cap) || cap == 0.0) continue;
            out[t] = dv / cap;
        }
    } else {
        Series base = rolling_mean(dollar_volume, fallback_window);
        for (size_t t = 0; t < out.size(); ++t) {
            if (is_missing(dollar_volume[t]) || is_missing(base[t]) || base[t] == 0.0) continue;
            out[t] = dollar_volume[t] / base[t];
        }
    }
    return out;
}

Series parkinson_vol(const Series& high, const Series& low) {
    if (high.size() != low.size()) throw ShapeError("parkinson: series lengths differ");
    static const double four_ln2 = 4.0 * std::log(2.0);
    Series out(high.size(), missing());
    for (size_t t = 0; t < high.size(); ++t) {
        const double h = high[t], l = low[t];
        if (is_missing(h) || is_missing(l)) continue;
        if (h <= 0.0 || l <= 0.0)
            throw DomainError("nonpositive high/low at index " + std::to_string(t));
        if (h < l) throw DomainError("high < low at index " + std::to_string(t));
        const double r = std::log(h / l);
        out[t] = std::sqrt(r * r / four_ln2);
    }
    return out;
}

ResidualizedSeries residualize(const Series& y, const Series& x, const std::string& source) {
    if (y.size() != x.size()) throw ShapeError("residualize: series lengths differ");
    std::vector<size_t> idx;
    for (size_t t = 0; t < y.size(); ++t)
        if (!is_missing(y[t]) && !is_missing(x[t])) idx.push_back(t);
    if (idx.size() < 3) throw SampleSizeError("residualize needs >= 3 joint observations");

    Eigen::MatrixXd X(idx.size(), 2);
    Eigen::VectorXd Y(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = x[idx[i]];
        Y(i) = y[idx[i]];
    }
    auto fit = stats::ols(X, Y);  // constant x raises CollinearityError here

    ResidualizedSeries out;
    out.intercept = fit.beta(0);
    out.slope = fit.beta(1);
    out.source = source;
    out.values.assign(y.size(), missing());
    for (size_t i = 0; i < idx.size(); ++i) out.values[idx[i]] = fit.residuals(i);
    return out;
}

Series rolling_mean(const Series& s, int window) {
    if (window < 1) throw ParameterError("rolling window must be >= 1");
    Series out(s.size(), missing());
    for (size_t t = window - 1; t < s.size(); ++t) {
        double sum = 0.0;
        bool ok = true;
        for (int k = 0; k < window; ++k) {
            const double v = s[t - k];
            if (is_missing(v)) {
                ok = false;
                break;
            }
            sum += v;
        }
        if (ok) out[t] = sum / window;
    }
    return out;
}

Series rolling_std(const Series& s, int window) {
    if (window < 2) throw ParameterError("rolling std window must be >= 2");
    Series out(s.size(), missing());
    std::vector<double> buf(window);
    for (size_t t = window - 1; t < s.size(); ++t) {
        bool ok = true;
        for (int k = 0; k < window; ++k) {
            buf[k] = s[t - k];
            if (is_missing(buf[k])) {
                ok = false;
                break;
            }
        }
        if (ok) out[t] = stats::sample_std(buf);
    }
    return out;
}

Series rolling_standardize(const Series& s, int window) {
    if (window < 2) throw ParameterError("rolling standardize window must be >= 2");
    Series out(s.size(), missing());
    std::vector<double> buf(window);
    for (size_t t = window - 1; t < s.size(); ++t) {
        bool ok = true;
        for (int k = 0; k < window; ++k) {
            buf[k] = s[t - k];
            if (is_missing(buf[k])) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        const double m = stats::mean(buf);
        const double sd = stats::sample_std(buf);
        // Constant windows can carry rounding dust; treat them as zero std.
        if (sd > 1e-12 * std::max(1.0, std::abs(m))) out[t] = (s[t] - m) / sd;
    }
    return out;
}

Panel build_lv_features(const Panel& raw, const std::vector<std::string>& assets,
                        const FeatureParams& params) {
    std::vector<ColumnMeta> cols;
    std::vector<Series> data;
    auto push = [&](const std::string& name, const std::string& asset, ColumnRole role,
                    Series s) {
        cols.push_back(ColumnMeta{name, asset, role});
        data.push_back(std::move(s));
    };

    for (const auto& a : assets) {
        const Series close = raw.col(a + "_close");
        const Series high = raw.col(a + "_high");
        const Series low = raw.col(a + "_low");
        const Series volume = raw.col(a + "_volume");
        std::optional<Series> cap;
        if (raw.has_column(a + "_mcap")) cap = raw.col(a + "_mcap");

        Series ret = log_returns(close);

        Series dv(close.size(), missing());
        for (size_t t = 0; t < close.size(); ++t)
            if (!is_missing(close[t]) && !is_missing(volume[t])) dv[t] = close[t] * volume[t];

        Series ami = amihud(ret, dv);
        Series turn = turnover(dv, cap, params.turnover_fallback_window);
        Series park = parkinson_vol(high, low);
        Series gvol = garch11_fit(ret, params.garch_min_obs).cond_vol_aligned(ret.size());

        Series resid_g = residualize(gvol, ret, a + "_garch_vol").values;
        Series resid_p = residualize(park, ret, a + "_park_vol").values;
        Series resid_t = residualize(turn, ret, a + "_turnover").values;

        push(a + "_ret", a, ColumnRole::ret, std::move(ret));
        push(a + "_amihud", a, ColumnRole::liquidity, std::move(ami));
        push(a + "_turnover", a, ColumnRole::turnover, std::move(turn));
        push(a + "_garch_vol", a, ColumnRole::vol_proxy, std::move(gvol));
        push(a + "_park_vol", a, ColumnRole::vol_proxy, std::move(park));
        push(a + "_resid_garch_vol", a, ColumnRole::resid_vol, std::move(resid_g));
        push(a + "_resid_park_vol", a, ColumnRole::resid_vol, std::move(resid_p));
        push(a + "_resid_turnover", a, ColumnRole::resid_vol, std::move(resid_t));
    }

    Eigen::MatrixXd vals(raw.n_rows(), data.size());
    for (size_t j = 0; j < data.size(); ++j)
        for (size_t t = 0; t < raw.n_rows(); ++t) vals(t, j) = data[j][t];
    return Panel(raw.dates(), std::move(cols), std::move(vals));
}

}  // namespace riskpipe
