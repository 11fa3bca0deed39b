#include "riskpipe/garch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>

#include "riskpipe/errors.hpp"

namespace riskpipe {

namespace {

// Unconstrained parametrization: theta0 = log omega; persistence
// s = alpha + beta = 0.999 * sigmoid(theta1); split u = sigmoid(theta2),
// alpha = s*u, beta = s*(1-u). Keeps omega > 0 and alpha + beta < 1.
struct Theta {
    double omega, alpha, beta;
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Theta decode(const std::array<double, 3>& t) {
    const double s = 0.999 * sigmoid(t[1]);
    const double u = sigmoid(t[2]);
    return {std::exp(t[0]), s * u, s * (1.0 - u)};
}

std::array<double, 3> encode(double omega, double alpha, double beta) {
    const double s = std::clamp((alpha + beta) / 0.999, 1e-6, 1.0 - 1e-6);
    const double u = std::clamp(alpha / std::max(alpha + beta, 1e-12), 1e-6, 1.0 - 1e-6);
    auto logit = [](double p) { return std::log(p / (1.0 - p)); };
    return {std::log(omega), logit(s), logit(u)};
}

double negloglik(const Theta& p, const std::vector<double>& eps, double init_var,
                 std::vector<double>* cond_var_out = nullptr) {
    const double log2pi = std::log(2.0 * M_PI);
    double sigma2 = init_var;
    double nll = 0.0;
    for (size_t t = 0; t < eps.size(); ++t) {
        if (t > 0) sigma2 = p.omega + p.alpha * eps[t - 1] * eps[t - 1] + p.beta * sigma2;
        sigma2 = std::max(sigma2, 1e-300);
        nll += 0.5 * (log2pi + std::log(sigma2) + eps[t] * eps[t] / sigma2);
        if (cond_var_out) (*cond_var_out)[t] = sigma2;
    }
    return nll;
}

struct NmResult {
    std::array<double, 3> x{};
    double f = 0.0;
    bool converged = false;
};

// Plain Nelder-Mead on R^3.
NmResult nelder_mead(const std::function<double(const std::array<double, 3>&)>& fn,
                     std::array<double, 3> x0, int max_iter, double tol) {
    constexpr int n = 3;
    std::array<std::array<double, 3>, n + 1> simplex;
    std::array<double, n + 1> fv;
    simplex[0] = x0;
    fv[0] = fn(x0);
    for (int i = 0; i < n; ++i) {
        auto x = x0;
        x[i] += 0.25;
        simplex[i + 1] = x;
        fv[i + 1] = fn(x);
    }

    auto order = [&] {
        std::array<int, n + 1> idx{};
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        std::array<std::array<double, 3>, n + 1> s2;
        std::array<double, n + 1> f2;
        for (int i = 0; i <= n; ++i) {
            s2[i] = simplex[idx[i]];
            f2[i] = fv[idx[i]];
        }
        simplex = s2;
        fv = f2;
    };

    NmResult res;
    for (int iter = 0; iter < max_iter; ++iter) {
        order();
        if (std::abs(fv[n] - fv[0]) < tol * (std::abs(fv[0]) + 1.0)) {
            res.converged = true;
            break;
        }
        std::array<double, 3> centroid{};
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < 3; ++d) centroid[d] += simplex[i][d] / n;

        auto blend = [&](double coef) {
            std::array<double, 3> x{};
            for (int d = 0; d < 3; ++d) x[d] = centroid[d] + coef * (simplex[n][d] - centroid[d]);
            return x;
        };

        auto xr = blend(-1.0);
        double fr = fn(xr);
        if (fr < fv[0]) {
            auto xe = blend(-2.0);
            double fe = fn(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            auto xc = blend(fr < fv[n] ? -0.5 : 0.5);
            double fc = fn(xc);
            if (fc < std::min(fr, fv[n])) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    for (int d = 0; d < 3; ++d)
                        simplex[i][d] = simplex[0][d] + 0.5 * (simplex[i][d] - simplex[0][d]);
                    fv[i] = fn(simplex[i]);
                }
            }
        }
    }
    order();
    res.x = simplex[0];
    res.f = fv[0];
    return res;
}

}  // namespace

Series GarchFit::cond_vol_aligned(size_t n) const {
    Series out(n, missing());
    for (size_t i = 0; i < obs_index.size(); ++i)
        if (obs_index[i] < n) out[obs_index[i]] = std::sqrt(cond_var[i]);
    return out;
}

GarchFit garch11_fit(const Series& returns, int min_obs) {
    GarchOptions opts;
    opts.min_obs = min_obs;
    return garch11_fit(returns, opts);
}

GarchFit garch11_fit(const Series& returns, const GarchOptions& opts) {
    std::vector<size_t> idx;
    std::vector<double> r;
    for (size_t t = 0; t < returns.size(); ++t)
        if (!is_missing(returns[t])) {
            idx.push_back(t);
            r.push_back(returns[t]);
        }
    if (static_cast<int>(r.size()) < opts.min_obs)
        throw SampleSizeError("garch11_fit needs >= " + std::to_string(opts.min_obs) +
                              " observations, got " + std::to_string(r.size()));

    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(r.size());
    std::vector<double> eps(r.size());
    double var = 0.0;
    for (size_t i = 0; i < r.size(); ++i) {
        eps[i] = r[i] - mean;
        var += eps[i] * eps[i];
    }
    var /= static_cast<double>(r.size() - 1);
    if (var <= 0.0)
        throw DegenerateVarianceError("garch11_fit: constant returns (zero variance)");

    auto objective = [&](const std::array<double, 3>& t) {
        return negloglik(decode(t), eps, var);
    };

    // Three documented starts spanning low/medium/high persistence.
    const std::array<std::array<double, 2>, 3> starts = {{
        {0.05, 0.90},  // alpha, beta
        {0.10, 0.70},
        {0.20, 0.40},
    }};

    // Best converged start wins; a lower non-converged iterate is kept only
    // for the error message.
    NmResult best, best_any;
    best.f = best_any.f = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        const double alpha0 = s[0], beta0 = s[1];
        const double omega0 = std::max(var * (1.0 - alpha0 - beta0), 1e-12);
        auto res = nelder_mead(objective, encode(omega0, alpha0, beta0),
                               opts.max_iter_per_start, opts.tol);
        if (res.f < best_any.f) best_any = res;
        if (res.converged && res.f < best.f) best = res;
    }
    if (!std::isfinite(best.f)) {
        best = best_any;
        Theta last = decode(best.x);
        std::ostringstream msg;
        msg << "garch11_fit did not converge within budget; last iterate omega=" << last.omega
            << " alpha=" << last.alpha << " beta=" << last.beta << " nll=" << best.f;
        throw ConvergenceError(msg.str());
    }

    Theta p = decode(best.x);
    GarchFit fit;
    fit.omega = p.omega;
    fit.alpha = p.alpha;
    fit.beta = p.beta;
    fit.mean = mean;
    fit.obs_index = std::move(idx);
    fit.cond_var.resize(eps.size());
    fit.loglik = -negloglik(p, eps, var, &fit.cond_var);
    return fit;
}

}  // namespace riskpipe
