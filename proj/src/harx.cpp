#include "riskpipe/harx.hpp"

#include <cmath>

#include "riskpipe/stats.hpp"

namespace riskpipe {

Eigen::MatrixXd har_regressors(const Eigen::MatrixXd& v, const std::vector<int>& windows) {
    if (windows.empty()) throw ParameterError("har_regressors: no windows");
    for (size_t i = 1; i < windows.size(); ++i)
        if (windows[i] <= windows[i - 1])
            throw ParameterError("har_regressors: windows must be strictly increasing");
    if (windows.front() < 1) throw ParameterError("har_regressors: windows must be >= 1");
    if (v.rows() < windows.back() + 1)
        throw SampleSizeError("har_regressors: series shorter than the longest window");

    const Eigen::Index T = v.rows(), K = v.cols();
    Eigen::MatrixXd out =
        Eigen::MatrixXd::Constant(T, K * static_cast<Eigen::Index>(windows.size()), missing());
    for (size_t w = 0; w < windows.size(); ++w) {
        const int win = windows[w];
        for (Eigen::Index k = 0; k < K; ++k) {
            for (Eigen::Index t = win - 1; t < T; ++t) {
                double sum = 0.0;
                bool ok = true;
                for (int h = 0; h < win; ++h) {
                    const double x = v(t - h, k);
                    if (is_missing(x)) {
                        ok = false;
                        break;
                    }
                    sum += x;
                }
                if (ok) out(t, w * K + k) = sum / win;
            }
        }
    }
    return out;
}

HarxFit harx_fit(const Series& y, const Eigen::MatrixXd& v, std::optional<int> nw_lag,
                 const std::vector<int>& windows) {
    if (static_cast<Eigen::Index>(y.size()) != v.rows())
        throw ShapeError("harx_fit: y and v lengths differ");

    const Eigen::MatrixXd regs = har_regressors(v, windows);
    const Eigen::Index K = v.cols();
    const Eigen::Index kreg = regs.cols();

    // y_t pairs with regressor windows ending at t-1.
    std::vector<Eigen::Index> rows;
    for (Eigen::Index t = 1; t < v.rows(); ++t)
        if (!is_missing(y[t]) && !regs.row(t - 1).hasNaN()) rows.push_back(t);

    const int T = static_cast<int>(rows.size());
    if (T < 50) throw SampleSizeError("harx_fit: joint sample < 50");

    Eigen::MatrixXd X(T, 1 + kreg);
    Eigen::VectorXd Y(T);
    for (int r = 0; r < T; ++r) {
        X(r, 0) = 1.0;
        X.block(r, 1, 1, kreg) = regs.row(rows[r] - 1);
        Y(r) = y[rows[r]];
    }
    const double y_mean = Y.mean();
    const double tss = (Y.array() - y_mean).square().sum();
    if (!(tss > 0.0)) throw DegenerateVarianceError("harx_fit: constant target");

    auto fit = stats::ols(X, Y);

    const int L = nw_lag ? *nw_lag
                         : static_cast<int>(std::floor(
                               4.0 * std::pow(static_cast<double>(T) / 100.0, 2.0 / 9.0)));
    if (L < 0) throw ParameterError("harx_fit: negative HAC lag");

    // Bartlett-kernel long-run covariance of g_t = x_t u_t.
    const Eigen::Index k = X.cols();
    Eigen::MatrixXd G(T, k);
    for (int t = 0; t < T; ++t) G.row(t) = X.row(t) * fit.residuals(t);
    Eigen::MatrixXd S = G.transpose() * G / static_cast<double>(T);
    for (int l = 1; l <= L; ++l) {
        const double w = 1.0 - static_cast<double>(l) / (L + 1.0);
        Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(k, k);
        for (int t = l; t < T; ++t) gamma += G.row(t).transpose() * G.row(t - l);
        gamma /= static_cast<double>(T);
        S += w * (gamma + gamma.transpose());
    }

    Eigen::MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(
        Eigen::MatrixXd::Identity(k, k));
    Eigen::MatrixXd cov = static_cast<double>(T) * xtx_inv * S * xtx_inv;
    cov = ((cov + cov.transpose()) / 2.0).eval();

    HarxFit out;
    out.coef = fit.beta;
    out.beta0 = fit.beta(0);
    out.beta_d = fit.beta.segment(1, K);
    out.beta_w = kreg >= 2 * K ? fit.beta.segment(1 + K, K) : Eigen::VectorXd();
    out.beta_m = kreg >= 3 * K ? fit.beta.segment(1 + 2 * K, K) : Eigen::VectorXd();
    out.hac_cov = cov;
    out.hac_se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    out.nw_lag = L;
    out.n_obs = T;
    out.r2 = 1.0 - fit.rss / tss;
    out.tstats.resize(k);
    out.pvals.resize(k);
    const double dof = static_cast<double>(T - k);
    for (Eigen::Index i = 0; i < k; ++i) {
        out.tstats(i) = out.hac_se(i) > 0.0 ? fit.beta(i) / out.hac_se(i) : 0.0;
        out.pvals(i) = 2.0 * stats::student_t_sf(std::abs(out.tstats(i)), dof);
    }
    return out;
}

}  // namespace riskpipe
