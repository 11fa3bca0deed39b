#include "riskpipe/factors.hpp"

#include <algorithm>
#include <cmath>

#include "riskpipe/features.hpp"
#include "riskpipe/stats.hpp"

namespace riskpipe {

PcaModel pca_fit(const Eigen::MatrixXd& x, const PcaKeep& keep,
                 const std::vector<std::string>& column_names) {
    const Eigen::Index n_cols = x.cols();
    if (n_cols < 1) throw ParameterError("pca_fit: no columns");

    std::vector<Eigen::Index> complete;
    for (Eigen::Index t = 0; t < x.rows(); ++t)
        if (!x.row(t).hasNaN()) complete.push_back(t);

    int k_request = std::holds_alternative<KeepK>(keep) ? std::get<KeepK>(keep).k : 1;
    if (static_cast<Eigen::Index>(complete.size()) < std::max<Eigen::Index>(k_request, 2))
        throw SampleSizeError("pca_fit: fewer complete rows than components");

    Eigen::MatrixXd xc(complete.size(), n_cols);
    for (size_t i = 0; i < complete.size(); ++i) xc.row(i) = x.row(complete[i]);

    PcaModel m;
    m.input_columns = column_names;
    m.means = xc.colwise().mean();
    m.stds.resize(n_cols);
    const double denom = static_cast<double>(xc.rows() - 1);
    for (Eigen::Index j = 0; j < n_cols; ++j) {
        const double sd = std::sqrt((xc.col(j).array() - m.means(j)).square().sum() / denom);
        if (!(sd > 0.0)) {
            const std::string name =
                j < static_cast<Eigen::Index>(column_names.size()) ? column_names[j]
                                                                   : std::to_string(j);
            throw DegenerateVarianceError("pca_fit: constant column '" + name + "'");
        }
        m.stds(j) = sd;
    }

    Eigen::MatrixXd z = (xc.rowwise() - m.means.transpose()).array().rowwise() /
                        m.stds.transpose().array();
    Eigen::MatrixXd corr = z.transpose() * z / denom;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    if (eig.info() != Eigen::Success)
        throw FactorizationError("pca_fit: eigendecomposition failed");

    // Eigen returns ascending order; flip to descending.
    Eigen::VectorXd evals = eig.eigenvalues().reverse();
    Eigen::MatrixXd evecs = eig.eigenvectors().rowwise().reverse();
    const double total = std::max(evals.sum(), 1e-300);

    int k = 0;
    if (std::holds_alternative<KeepK>(keep)) {
        k = std::get<KeepK>(keep).k;
        if (k < 1 || k > n_cols) throw ParameterError("pca_fit: k out of range");
    } else {
        const double threshold = std::get<KeepCumVariance>(keep).fraction;
        if (!(threshold > 0.0 && threshold <= 1.0))
            throw ParameterError("pca_fit: cumulative-variance fraction must be in (0,1]");
        double cum = 0.0;
        for (Eigen::Index i = 0; i < n_cols; ++i) {
            cum += evals(i) / total;
            ++k;
            if (cum >= threshold - 1e-12) break;
        }
    }

    m.loadings = evecs.leftCols(k);
    m.explained_ratio = evals.head(k) / total;

    // Deterministic sign: largest-|entry| of each loading column positive.
    for (int j = 0; j < k; ++j) {
        Eigen::Index arg = 0;
        m.loadings.col(j).cwiseAbs().maxCoeff(&arg);
        if (m.loadings(arg, j) < 0.0) m.loadings.col(j) = -m.loadings.col(j);
    }
    return m;
}

Eigen::MatrixXd pca_transform(const PcaModel& m, const Eigen::MatrixXd& x) {
    if (x.cols() != m.means.size())
        throw ShapeError("pca_transform: column count does not match model");
    Eigen::MatrixXd scores =
        Eigen::MatrixXd::Constant(x.rows(), m.loadings.cols(), missing());
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        if (x.row(t).hasNaN()) continue;
        Eigen::VectorXd z =
            ((x.row(t).transpose() - m.means).array() / m.stds.array()).matrix();
        scores.row(t) = (z.transpose() * m.loadings);
    }
    return scores;
}

Series crowding_target(const Eigen::MatrixXd& vol_pc_scores, const CrowdingSpec& spec) {
    const int K = spec.K > 0 ? spec.K : static_cast<int>(vol_pc_scores.cols());
    if (K < 1 || K > vol_pc_scores.cols())
        throw ParameterError("crowding_target: K out of range");
    for (int k : spec.leave_out)
        if (k < 1 || k > K) throw ParameterError("crowding_target: leave_out index out of range");

    std::vector<int> retained;
    for (int k = 1; k <= K; ++k)
        if (!spec.leave_out.count(k)) retained.push_back(k - 1);
    if (retained.empty()) throw ParameterError("crowding_target: all PCs excluded");

    const Eigen::Index T = vol_pc_scores.rows();
    Eigen::MatrixXd z = Eigen::MatrixXd::Constant(T, retained.size(), missing());

    for (size_t j = 0; j < retained.size(); ++j) {
        Series s(T);
        for (Eigen::Index t = 0; t < T; ++t) s[t] = vol_pc_scores(t, retained[j]);
        if (spec.standardization == CrowdingStandardization::rolling) {
            Series zs = rolling_standardize(s, spec.rolling_window);
            for (Eigen::Index t = 0; t < T; ++t) z(t, j) = zs[t];
        } else {
            std::vector<double> obs;
            for (double v : s)
                if (!is_missing(v)) obs.push_back(v);
            if (obs.size() < 2) throw SampleSizeError("crowding_target: too few observations");
            const double mu = stats::mean(obs);
            const double sd = stats::sample_std(obs);
            if (!(sd > 0.0))
                throw DegenerateVarianceError("crowding_target: constant PC score column");
            for (Eigen::Index t = 0; t < T; ++t)
                if (!is_missing(s[t])) z(t, j) = (s[t] - mu) / sd;
        }
    }

    Series out(T, missing());
    for (Eigen::Index t = 0; t < T; ++t) {
        if (z.row(t).hasNaN()) continue;
        out[t] = std::sqrt(z.row(t).squaredNorm() / static_cast<double>(retained.size()));
    }
    return out;
}

LegacyRvTargets legacy_rv_targets(const Series& market_return, int rs_window) {
    size_t n_obs = 0;
    for (double r : market_return)
        if (!is_missing(r)) ++n_obs;
    if (n_obs < 14) throw SampleSizeError("legacy_rv_targets needs >= 14 returns");

    constexpr int window = 14;
    Series rv(market_return.size(), missing());
    for (size_t t = window - 1; t < market_return.size(); ++t) {
        double ss = 0.0;
        bool ok = true;
        for (int h = 0; h < window; ++h) {
            const double r = market_return[t - h];
            if (is_missing(r)) {
                ok = false;
                break;
            }
            ss += r * r;
        }
        if (ok) rv[t] = std::sqrt(ss);
    }
    LegacyRvTargets out;
    out.market_rv14_rs = rolling_standardize(rv, rs_window);
    out.market_rv14 = std::move(rv);
    return out;
}

Series risk_index(const Eigen::MatrixXd& features, const Eigen::MatrixXd& structural_shocks,
                  const RiskIndexSpec& spec) {
    if (features.rows() != structural_shocks.rows())
        throw ShapeError("risk_index: features and shocks must be date-aligned");
    if (spec.H < 1) throw ParameterError("risk_index: H must be >= 1");
    if (spec.feat_window < 2 || spec.shock_window < 2)
        throw ParameterError("risk_index: windows must be >= 2");

    const Eigen::Index T = features.rows();
    Series feat_mean(T, missing()), shock_mean(T, missing());
    for (Eigen::Index t = 0; t < T; ++t) {
        if (!features.row(t).hasNaN() && features.cols() > 0)
            feat_mean[t] = features.row(t).mean();
        if (!structural_shocks.row(t).hasNaN() && structural_shocks.cols() > 0)
            shock_mean[t] = structural_shocks.row(t).cwiseAbs().mean();
    }

    Series sigma_feat = rolling_std(feat_mean, spec.feat_window);
    Series abs_shock = rolling_mean(shock_mean, spec.shock_window);

    Series out(T, missing());
    for (Eigen::Index t = 0; t < T; ++t) {
        double sum = 0.0;
        bool ok = t + 1 >= spec.H;
        for (int h = 1; ok && h <= spec.H; ++h) {
            const Eigen::Index s = t - h + 1;
            if (is_missing(sigma_feat[s]) || is_missing(abs_shock[s])) {
                ok = false;
                break;
            }
            sum += sigma_feat[s] + abs_shock[s];
        }
        if (ok) out[t] = sum / spec.H;
    }
    return out;
}

Series forward_label(const Series& s, int horizon) {
    if (horizon < 1) throw ParameterError("forward_label: horizon must be >= 1");
    Series out(s.size(), missing());
    for (size_t t = 0; t + horizon < s.size(); ++t) out[t] = s[t + horizon];
    return out;
}

}  // namespace riskpipe
