#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riskpipe/panel.hpp"

namespace riskpipe {

struct ResidualizedSeries {
    Series values;  // residuals; missing where either input is missing
    double slope = 0.0;
    double intercept = 0.0;
    std::string source;
};

// r_t = ln(P_t / P_{t-1}); first value missing; a missing price knocks out
// the return at t and t+1. Nonpositive observed price is a domain error.
Series log_returns(const Series& price);

// A_t = |r_t| / DV_t; zero or missing dollar volume gives missing.
Series amihud(const Series& returns, const Series& dollar_volume);

// dollar_volume / market_cap when a cap series is supplied; otherwise
// dollar_volume over its trailing `fallback_window`-day mean (full windows
// only). Default window 252.
Series turnover(const Series& dollar_volume, const std::optional<Series>& market_cap,
                int fallback_window = 252);

// Range estimator: sigma_t = sqrt( ln(H/L)^2 / (4 ln 2) ).
Series parkinson_vol(const Series& high, const Series& low);

// OLS with intercept of y on x over jointly observed dates.
ResidualizedSeries residualize(const Series& y, const Series& x,
                               const std::string& source = "");

// Trailing z-score over a W-day window (information dated <= t only).
// Windows with any missing value, or zero std, give missing.
Series rolling_standardize(const Series& s, int window);

// Trailing mean over a full W-day window ending at t; missing elsewhere.
Series rolling_mean(const Series& s, int window);

// Trailing sample std over a full W-day window ending at t.
Series rolling_std(const Series& s, int window);

struct FeatureParams {
    int turnover_fallback_window = 252;
    int garch_min_obs = 250;
};

// Per-core LV proxy engineering: for each asset emits
//   <A>_ret, <A>_amihud, <A>_turnover, <A>_garch_vol, <A>_park_vol,
//   <A>_resid_garch_vol, <A>_resid_park_vol, <A>_resid_turnover.
// Input is an aligned raw panel holding <A>_close/high/low/volume[/mcap].
Panel build_lv_features(const Panel& raw, const std::vector<std::string>& assets,
                        const FeatureParams& params = {});

}  // namespace riskpipe
