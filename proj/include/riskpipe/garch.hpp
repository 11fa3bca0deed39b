#pragma once

#include <cstddef>
#include <vector>

#include "riskpipe/panel.hpp"

namespace riskpipe {

// Gaussian GARCH(1,1) fit on demeaned returns:
//   sigma2_t = omega + alpha * eps_{t-1}^2 + beta * sigma2_{t-1}
struct GarchFit {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double mean = 0.0;            // sample mean removed before fitting
    std::vector<double> cond_var; // sigma2_t over the fitted observations
    double loglik = 0.0;
    std::vector<size_t> obs_index;  // positions of the fitted obs in the input

    // Conditional sigma_t mapped back onto an n-length series; missing where
    // the input return was missing.
    Series cond_vol_aligned(size_t n) const;
};

struct GarchOptions {
    int min_obs = 250;
    int max_iter_per_start = 800;  // Nelder-Mead iterations, 3 starts
    double tol = 1e-10;
};

GarchFit garch11_fit(const Series& returns, int min_obs = 250);
GarchFit garch11_fit(const Series& returns, const GarchOptions& opts);

}  // namespace riskpipe
