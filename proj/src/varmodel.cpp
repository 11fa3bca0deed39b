#include "riskpipe/varmodel.hpp"

#include <cmath>
#include <limits>

#include "riskpipe/stats.hpp"

namespace riskpipe {

namespace {

// Rows where y_t and its p lags are all observed.
std::vector<Eigen::Index> embeddable_rows(const Eigen::MatrixXd& y, int p) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index t = p; t < y.rows(); ++t) {
        bool ok = true;
        for (int i = 0; i <= p && ok; ++i)
            if (y.row(t - i).hasNaN()) ok = false;
        if (ok) rows.push_back(t);
    }
    return rows;
}

struct Design {
    Eigen::MatrixXd X;  // rows x (1 + n p)
    Eigen::MatrixXd Y;  // rows x n
};

Design build_design(const Eigen::MatrixXd& y, int p, const std::vector<Eigen::Index>& rows) {
    const Eigen::Index n = y.cols();
    Design d;
    d.X.resize(rows.size(), 1 + n * p);
    d.Y.resize(rows.size(), n);
    for (size_t r = 0; r < rows.size(); ++r) {
        const Eigen::Index t = rows[r];
        d.X(r, 0) = 1.0;
        for (int i = 1; i <= p; ++i) d.X.block(r, 1 + (i - 1) * n, 1, n) = y.row(t - i);
        d.Y.row(r) = y.row(t);
    }
    return d;
}

struct FitResult {
    Eigen::MatrixXd B;  // (1 + n p) x n
    Eigen::MatrixXd E;  // residuals
};

FitResult fit_design(const Design& d) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.X);
    qr.setThreshold(1e-10);
    if (qr.rank() < d.X.cols())
        throw CollinearityError("var_fit: singular regressor matrix");
    FitResult f;
    f.B = qr.solve(d.Y);
    f.E = d.Y - d.X * f.B;
    return f;
}

double log_det_cov(const Eigen::MatrixXd& E) {
    const double T = static_cast<double>(E.rows());
    Eigen::MatrixXd sigma = E.transpose() * E / T;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) {
        double ld = 0.0;
        for (Eigen::Index i = 0; i < sigma.rows(); ++i)
            ld += 2.0 * std::log(llt.matrixL()(i, i));
        return ld;
    }
    // Semi-definite fallback via eigenvalues.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
    double ld = 0.0;
    for (Eigen::Index i = 0; i < sigma.rows(); ++i)
        ld += std::log(std::max(eig.eigenvalues()(i), 1e-300));
    return ld;
}

// Cholesky of the residual covariance with one ridge-jitter retry.
Eigen::MatrixXd lower_cholesky(const Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    const double jitter = 1e-10 * sigma.trace() / static_cast<double>(sigma.rows());
    Eigen::MatrixXd ridged =
        sigma + jitter * Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols());
    Eigen::LLT<Eigen::MatrixXd> retry(ridged);
    if (retry.info() != Eigen::Success)
        throw FactorizationError(
            "residual covariance is not positive definite (even after ridge jitter)");
    return retry.matrixL();
}

}  // namespace

VarModel var_fit(const Eigen::MatrixXd& y, const VarOrder& order,
                 const std::vector<std::string>& names) {
    const Eigen::Index n = y.cols();
    if (n < 1) throw ParameterError("var_fit: no variables");

    int p = 0;
    if (std::holds_alternative<OrderFixed>(order)) {
        p = std::get<OrderFixed>(order).p;
        if (p < 1) throw ParameterError("var_fit: order must be >= 1");
        auto rows = embeddable_rows(y, p);
        const Eigen::Index min_rows = n * p + p + 20;
        if (static_cast<Eigen::Index>(rows.size()) < min_rows)
            throw SampleSizeError("var_fit: need >= " + std::to_string(min_rows) +
                                  " usable rows, have " + std::to_string(rows.size()));
    } else {
        const int pmax = std::get<OrderBic>(order).pmax;
        if (pmax < 1) throw ParameterError("var_fit: pmax must be >= 1");
        auto common = embeddable_rows(y, pmax);
        const Eigen::Index min_rows = n * pmax + pmax + 20;
        if (static_cast<Eigen::Index>(common.size()) < min_rows)
            throw SampleSizeError("var_fit: need >= " + std::to_string(min_rows) +
                                  " usable rows for BIC search, have " +
                                  std::to_string(common.size()));
        const double T = static_cast<double>(common.size());
        double best = std::numeric_limits<double>::infinity();
        for (int cand = 1; cand <= pmax; ++cand) {
            auto fit = fit_design(build_design(y, cand, common));
            const double bic =
                log_det_cov(fit.E) +
                static_cast<double>(cand) * n * n * std::log(T) / T;
            if (bic < best - 1e-12) {
                best = bic;
                p = cand;
            }
        }
    }

    auto rows = embeddable_rows(y, p);
    auto design = build_design(y, p, rows);
    auto fit = fit_design(design);

    VarModel m;
    m.order = p;
    m.names = names;
    m.intercept = fit.B.row(0).transpose();
    for (int i = 1; i <= p; ++i)
        m.coeffs.push_back(fit.B.middleRows(1 + (i - 1) * n, n).transpose());
    m.residuals = fit.E;
    m.sample_rows = rows;
    const double dof =
        static_cast<double>(fit.E.rows()) - static_cast<double>(n * p + 1);
    if (dof <= 0) throw SampleSizeError("var_fit: nonpositive residual dof");
    m.resid_cov = fit.E.transpose() * fit.E / dof;
    // Exact symmetry for downstream Cholesky.
    m.resid_cov = ((m.resid_cov + m.resid_cov.transpose()) / 2.0).eval();
    return m;
}

std::vector<Eigen::MatrixXd> orth_irf(const VarModel& m, int horizons) {
    if (horizons < 0) throw ParameterError("orth_irf: horizons must be >= 0");
    const int n = m.n_vars();
    const Eigen::MatrixXd P = lower_cholesky(m.resid_cov);

    std::vector<Eigen::MatrixXd> phi(horizons + 1);
    phi[0] = Eigen::MatrixXd::Identity(n, n);
    for (int h = 1; h <= horizons; ++h) {
        phi[h] = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i <= std::min(h, m.order); ++i) phi[h] += m.coeffs[i - 1] * phi[h - i];
    }
    std::vector<Eigen::MatrixXd> irf(horizons + 1);
    for (int h = 0; h <= horizons; ++h) irf[h] = phi[h] * P;
    return irf;
}

std::vector<Eigen::MatrixXd> fevd(const VarModel& m, int horizons) {
    if (horizons < 1) throw ParameterError("fevd: horizons must be >= 1");
    auto irf = orth_irf(m, horizons - 1);
    const int n = m.n_vars();

    std::vector<Eigen::MatrixXd> shares(horizons);
    Eigen::MatrixXd cum = Eigen::MatrixXd::Zero(n, n);
    for (int h = 0; h < horizons; ++h) {
        cum += irf[h].cwiseProduct(irf[h]);
        shares[h].resize(n, n);
        for (int i = 0; i < n; ++i) {
            const double denom = cum.row(i).sum();
            if (!(denom > 0.0))
                throw DegenerateVarianceError("fevd: zero forecast error variance");
            shares[h].row(i) = cum.row(i) / denom;
        }
    }
    return shares;
}

LjungBoxResult ljung_box(const Series& resid, int lags) {
    if (lags < 1) throw ParameterError("ljung_box: lags must be >= 1");
    std::vector<double> x;
    for (double v : resid)
        if (!is_missing(v)) x.push_back(v);
    const int T = static_cast<int>(x.size());
    if (T <= lags + 1) throw SampleSizeError("ljung_box: series too short");

    const double mean = stats::mean(x);
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (!(denom > 0.0)) throw DegenerateVarianceError("ljung_box: zero-variance residuals");

    double Q = 0.0;
    for (int k = 1; k <= lags; ++k) {
        double num = 0.0;
        for (int t = k; t < T; ++t) num += (x[t] - mean) * (x[t - k] - mean);
        const double rho = num / denom;
        Q += rho * rho / static_cast<double>(T - k);
    }
    Q *= static_cast<double>(T) * (T + 2.0);

    LjungBoxResult out;
    out.Q = Q;
    out.p = stats::chi2_sf(Q, lags);
    return out;
}

Eigen::MatrixXd structural_shocks(const VarModel& m) {
    const Eigen::MatrixXd P = lower_cholesky(m.resid_cov);
    // u_t = P^-1 e_t, i.e. U^T = P^-1 E^T via triangular solve.
    return P.triangularView<Eigen::Lower>()
        .solve(m.residuals.transpose())
        .transpose();
}

double companion_spectral_radius(const VarModel& m) {
    const int n = m.n_vars();
    const int p = m.order;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n * p, n * p);
    for (int i = 0; i < p; ++i) comp.block(0, i * n, n, n) = m.coeffs[i];
    if (p > 1)
        comp.block(n, 0, n * (p - 1), n * (p - 1)) =
            Eigen::MatrixXd::Identity(n * (p - 1), n * (p - 1));
    return comp.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace riskpipe
