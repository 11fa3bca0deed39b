#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "riskpipe/panel.hpp"

namespace riskpipe {

// Trailing means of each input column over each window (inclusive of t,
// information dated <= t only). Output column order: all columns at
// windows[0], then windows[1], ... Rows with incomplete windows are missing.
Eigen::MatrixXd har_regressors(const Eigen::MatrixXd& v,
                               const std::vector<int>& windows = {1, 5, 22});

struct HarxFit {
    double beta0 = 0.0;
    Eigen::VectorXd beta_d, beta_w, beta_m;  // per input column
    Eigen::VectorXd coef;                    // [b0, d..., w..., m...]
    Eigen::VectorXd hac_se;
    Eigen::VectorXd tstats;
    Eigen::VectorXd pvals;
    Eigen::MatrixXd hac_cov;
    int nw_lag = 0;
    double r2 = 0.0;
    int n_obs = 0;
};

// OLS of y_t on [1, daily/weekly/monthly trailing means of v ending at t-1]
// (one-day publication gap), with Bartlett-kernel HAC standard errors.
// nw_lag: std::nullopt selects L = floor(4 (T/100)^{2/9}).
HarxFit harx_fit(const Series& y, const Eigen::MatrixXd& v,
                 std::optional<int> nw_lag = std::nullopt,
                 const std::vector<int>& windows = {1, 5, 22});

}  // namespace riskpipe
