#include "riskpipe/mlproto.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "riskpipe/harx.hpp"
#include "riskpipe/stats.hpp"

namespace riskpipe {

SplitSpec chrono_split(size_t n, std::array<double, 3> fractions) {
    const double f1 = fractions[0], f2 = fractions[1], f3 = fractions[2];
    if (!(f1 > 0 && f2 > 0 && f3 > 0) || std::abs(f1 + f2 + f3 - 1.0) > 1e-9)
        throw ParameterError("chrono_split: fractions must be positive and sum to 1");
    SplitSpec s;
    s.train_begin = 0;
    s.train_end = static_cast<size_t>(std::floor(f1 * static_cast<double>(n)));
    s.valid_end = static_cast<size_t>(std::floor((f1 + f2) * static_cast<double>(n)));
    s.test_end = n;
    if (s.train_size() == 0 || s.valid_size() == 0 || s.test_size() == 0)
        throw SampleSizeError("chrono_split: n=" + std::to_string(n) +
                              " leaves an empty split");
    return s;
}

Series label_top_quantile(const Series& risk, double q, const SplitSpec& split) {
    if (!(q > 0.0 && q < 1.0)) throw ParameterError("label_top_quantile: q must be in (0,1)");
    if (split.test_end > risk.size())
        throw ShapeError("label_top_quantile: split exceeds series length");

    std::vector<double> train;
    for (size_t t = split.train_begin; t < split.train_end; ++t)
        if (!is_missing(risk[t])) train.push_back(risk[t]);
    if (train.size() < 20)
        throw SampleSizeError("label_top_quantile: train segment needs >= 20 observations");

    std::sort(train.begin(), train.end());
    if (train.front() == train.back())
        throw DegenerateVarianceError("label_top_quantile: degenerate train distribution");

    // Nearest rank: smallest order statistic with cumulative fraction >= q.
    const size_t rank = static_cast<size_t>(
        std::ceil(q * static_cast<double>(train.size())));
    const double cut = train[std::min(rank, train.size()) - 1];

    Series out(risk.size(), missing());
    for (size_t t = 0; t < risk.size(); ++t)
        if (!is_missing(risk[t])) out[t] = risk[t] > cut ? 1.0 : 0.0;
    return out;
}

double f1_score(const std::vector<int>& labels, const std::vector<int>& preds) {
    if (labels.size() != preds.size()) throw ShapeError("f1_score: length mismatch");
    int tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (preds[i] == 1 && labels[i] == 1) ++tp;
        if (preds[i] == 1 && labels[i] == 0) ++fp;
        if (preds[i] == 0 && labels[i] == 1) ++fn;
    }
    const double denom = 2.0 * tp + fp + fn;
    return denom > 0.0 ? 2.0 * tp / denom : 0.0;
}

ThresholdChoice choose_threshold(const std::vector<double>& scores,
                                 const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw ShapeError("choose_threshold: length mismatch");
    bool has_pos = false, has_neg = false;
    for (int l : labels) (l == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw ProtocolError("choose_threshold: validation has a single class");

    std::vector<double> uniq(scores);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    std::vector<double> grid;
    grid.push_back(uniq.front());
    for (size_t i = 0; i + 1 < uniq.size(); ++i)
        grid.push_back(0.5 * (uniq[i] + uniq[i + 1]));
    grid.push_back(uniq.back());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    ThresholdChoice choice;
    choice.candidate_grid = "unique-score midpoints plus extremes (" +
                            std::to_string(grid.size()) + " candidates)";
    choice.valid_f1 = -1.0;
    std::vector<int> preds(scores.size());
    for (double tau : grid) {
        for (size_t i = 0; i < scores.size(); ++i) preds[i] = scores[i] >= tau ? 1 : 0;
        const double f1 = f1_score(labels, preds);
        if (f1 > choice.valid_f1 + 1e-12) {
            choice.valid_f1 = f1;
            choice.tau = tau;
        }
    }
    return choice;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    const size_t n = scores.size();
    size_t n_pos = 0;
    for (int l : labels) n_pos += l == 1;
    const size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw ProtocolError("roc_auc: single-class labels");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // Average ranks across ties.
    std::vector<double> rank(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    double rank_sum = 0.0;
    for (size_t k = 0; k < n; ++k)
        if (labels[k] == 1) rank_sum += rank[k];
    return (rank_sum - static_cast<double>(n_pos) * (n_pos + 1) / 2.0) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

// Points after each tied score group, scanning from the highest score down.
struct SweepPoint {
    double threshold;
    int tp;
    int fp;
};

std::vector<SweepPoint> sweep_points(const std::vector<double>& scores,
                                     const std::vector<int>& labels) {
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] > scores[b]; });
    std::vector<SweepPoint> pts;
    int tp = 0, fp = 0;
    size_t i = 0;
    while (i < order.size()) {
        const double v = scores[order[i]];
        while (i < order.size() && scores[order[i]] == v) {
            (labels[order[i]] == 1 ? tp : fp)++;
            ++i;
        }
        pts.push_back({v, tp, fp});
    }
    return pts;
}

}  // namespace

double pr_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    int n_pos = 0;
    for (int l : labels) n_pos += l == 1;
    if (n_pos == 0 || n_pos == static_cast<int>(labels.size()))
        throw ProtocolError("pr_auc: single-class labels");

    double auc = 0.0, prev_recall = 0.0;
    for (const auto& pt : sweep_points(scores, labels)) {
        const double recall = static_cast<double>(pt.tp) / n_pos;
        const double precision = static_cast<double>(pt.tp) / (pt.tp + pt.fp);
        auc += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return auc;
}

std::vector<CurvePoint> roc_curve(const std::vector<double>& scores,
                                  const std::vector<int>& labels) {
    int n_pos = 0;
    for (int l : labels) n_pos += l == 1;
    const int n_neg = static_cast<int>(labels.size()) - n_pos;
    std::vector<CurvePoint> out;
    out.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    for (const auto& pt : sweep_points(scores, labels))
        out.push_back({n_neg > 0 ? static_cast<double>(pt.fp) / n_neg : 0.0,
                       n_pos > 0 ? static_cast<double>(pt.tp) / n_pos : 0.0, pt.threshold});
    return out;
}

std::vector<CurvePoint> pr_curve(const std::vector<double>& scores,
                                 const std::vector<int>& labels) {
    int n_pos = 0;
    for (int l : labels) n_pos += l == 1;
    std::vector<CurvePoint> out;
    out.push_back({0.0, 1.0, std::numeric_limits<double>::infinity()});
    for (const auto& pt : sweep_points(scores, labels))
        out.push_back({n_pos > 0 ? static_cast<double>(pt.tp) / n_pos : 0.0,
                       static_cast<double>(pt.tp) / (pt.tp + pt.fp), pt.threshold});
    return out;
}

RegressionMetrics regression_metrics(const std::vector<double>& y_true,
                                     const std::vector<double>& y_pred) {
    if (y_true.size() != y_pred.size()) throw ShapeError("regression_metrics: length mismatch");
    if (y_true.empty()) throw EmptyInputError("regression_metrics: empty input");
    const double mean =
        std::accumulate(y_true.begin(), y_true.end(), 0.0) / y_true.size();
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < y_true.size(); ++i) {
        ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
        ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
    }
    RegressionMetrics m;
    m.mse = ss_res / y_true.size();
    m.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : missing();
    return m;
}

ClassificationMetrics classification_metrics(const std::vector<double>& scores,
                                             const std::vector<int>& labels, double tau) {
    if (scores.size() != labels.size())
        throw ShapeError("classification_metrics: length mismatch");
    ClassificationMetrics m;
    std::vector<int> preds(scores.size());
    for (size_t i = 0; i < scores.size(); ++i) preds[i] = scores[i] >= tau ? 1 : 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 1)
            (preds[i] == 1 ? m.confusion.tp : m.confusion.fn)++;
        else
            (preds[i] == 1 ? m.confusion.fp : m.confusion.tn)++;
    }
    m.f1 = f1_score(labels, preds);
    m.accuracy = static_cast<double>(m.confusion.tp + m.confusion.tn) /
                 static_cast<double>(scores.size());
    try {
        m.roc_auc = roc_auc(scores, labels);
        m.pr_auc = pr_auc(scores, labels);
        m.auc_defined = true;
    } catch (const ProtocolError&) {
        m.roc_auc = missing();
        m.pr_auc = missing();
        m.auc_defined = false;
    }
    return m;
}

EvalReport evaluate(const std::vector<double>& scores, const std::vector<int>& labels,
                    const std::vector<double>& y_true, const std::vector<double>& y_pred,
                    double tau) {
    EvalReport report;
    report.regression = regression_metrics(y_true, y_pred);
    report.classification = classification_metrics(scores, labels, tau);
    return report;
}

Eigen::VectorXd LogisticFit::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double z = beta(0);
        for (Eigen::Index j = 0; j < X.cols(); ++j) z += beta(j + 1) * X(i, j);
        out(i) = 1.0 / (1.0 + std::exp(-z));
    }
    return out;
}

LogisticFit logistic_fit(const Eigen::MatrixXd& X, const std::vector<int>& y, int max_iter,
                         double ridge) {
    if (X.rows() != static_cast<Eigen::Index>(y.size()))
        throw ShapeError("logistic_fit: X/y mismatch");
    const Eigen::Index n = X.rows(), k = X.cols() + 1;

    Eigen::MatrixXd Xd(n, k);
    Xd.col(0).setOnes();
    Xd.rightCols(X.cols()) = X;

    LogisticFit fit;
    fit.beta = Eigen::VectorXd::Zero(k);
    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::VectorXd eta = Xd * fit.beta;
        Eigen::VectorXd p(n), w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            p(i) = 1.0 / (1.0 + std::exp(-eta(i)));
            w(i) = std::max(p(i) * (1.0 - p(i)), 1e-10);
        }
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
        Eigen::MatrixXd hess = ridge * Eigen::MatrixXd::Identity(k, k);
        for (Eigen::Index i = 0; i < n; ++i) {
            grad += (static_cast<double>(y[i]) - p(i)) * Xd.row(i).transpose();
            hess += w(i) * Xd.row(i).transpose() * Xd.row(i);
        }
        grad -= ridge * fit.beta;
        Eigen::VectorXd step = hess.ldlt().solve(grad);
        fit.beta += step;
        if (step.cwiseAbs().maxCoeff() < 1e-10) {
            fit.converged = true;
            break;
        }
    }
    return fit;
}

namespace {

std::vector<double> slice(const Series& s, size_t begin, size_t end) {
    return std::vector<double>(s.begin() + begin, s.begin() + end);
}

std::vector<int> slice_labels(const std::vector<int>& s, size_t begin, size_t end) {
    return std::vector<int>(s.begin() + begin, s.begin() + end);
}

}  // namespace

std::vector<BaselineReport> baselines(const Eigen::MatrixXd& X, const Series& persistence,
                                      const Series& y, const std::vector<int>& labels,
                                      const SplitSpec& split) {
    if (static_cast<size_t>(X.rows()) != y.size() || y.size() != persistence.size() ||
        y.size() != labels.size())
        throw ShapeError("baselines: input lengths differ");
    if (split.test_end != y.size())
        throw ShapeError("baselines: split does not cover the sample");

    std::vector<BaselineReport> out;

    auto level_metrics = [&](const Series& pred) {
        return regression_metrics(slice(y, split.valid_end, split.test_end),
                                  slice(pred, split.valid_end, split.test_end));
    };

    // AR(H) persistence: y_t ~ 1 + persistence_t fit on train.
    {
        Eigen::MatrixXd Xt(split.train_size(), 2);
        Eigen::VectorXd Yt(split.train_size());
        for (size_t t = split.train_begin; t < split.train_end; ++t) {
            Xt(t - split.train_begin, 0) = 1.0;
            Xt(t - split.train_begin, 1) = persistence[t];
            Yt(t - split.train_begin) = y[t];
        }
        auto fit = stats::ols(Xt, Yt);
        Series pred(y.size());
        for (size_t t = 0; t < y.size(); ++t)
            pred[t] = fit.beta(0) + fit.beta(1) * persistence[t];
        BaselineReport r;
        r.name = "ar_persistence";
        r.test.regression = level_metrics(pred);
        out.push_back(std::move(r));
    }

    // HAR-X on daily/weekly/monthly windows of the persistence series,
    // restricted to windows observable inside the sample.
    {
        Eigen::MatrixXd v(persistence.size(), 1);
        for (size_t t = 0; t < persistence.size(); ++t) v(t, 0) = persistence[t];
        Eigen::MatrixXd regs = har_regressors(v, {1, 5, 22});

        std::vector<Eigen::Index> train_rows;
        for (size_t t = std::max<size_t>(split.train_begin, 1); t < split.train_end; ++t)
            if (!is_missing(y[t]) && !regs.row(t - 1).hasNaN()) train_rows.push_back(t);
        if (train_rows.size() < 30)
            throw SampleSizeError("baselines: HAR-X train sample too small");
        Eigen::MatrixXd Xt(train_rows.size(), 4);
        Eigen::VectorXd Yt(train_rows.size());
        for (size_t i = 0; i < train_rows.size(); ++i) {
            Xt(i, 0) = 1.0;
            Xt.block(i, 1, 1, 3) = regs.row(train_rows[i] - 1);
            Yt(i) = y[train_rows[i]];
        }
        auto fit = stats::ols(Xt, Yt);
        Series pred(y.size(), missing());
        for (size_t t = 1; t < y.size(); ++t) {
            if (regs.row(t - 1).hasNaN()) continue;
            pred[t] = fit.beta(0) + (regs.row(t - 1) * fit.beta.tail(3))(0, 0);
        }
        std::vector<double> yt, yp;
        for (size_t t = split.valid_end; t < split.test_end; ++t)
            if (!is_missing(pred[t])) {
                yt.push_back(y[t]);
                yp.push_back(pred[t]);
            }
        BaselineReport r;
        r.name = "harx";
        r.test.regression = regression_metrics(yt, yp);
        out.push_back(std::move(r));
    }

    // Logistic classifier on the shared lagged feature matrix; threshold
    // chosen on validation exactly like the main model.
    {
        Eigen::MatrixXd Xt = X.middleRows(split.train_begin, split.train_size());
        auto fit = logistic_fit(Xt, slice_labels(labels, split.train_begin, split.train_end));

        Eigen::VectorXd valid_scores =
            fit.predict(X.middleRows(split.train_end, split.valid_size()));
        Eigen::VectorXd test_scores =
            fit.predict(X.middleRows(split.valid_end, split.test_size()));
        std::vector<double> vs(valid_scores.data(), valid_scores.data() + valid_scores.size());
        std::vector<double> ts(test_scores.data(), test_scores.data() + test_scores.size());

        auto choice =
            choose_threshold(vs, slice_labels(labels, split.train_end, split.valid_end));
        BaselineReport r;
        r.name = "logistic";
        r.tau = choice.tau;
        r.test.classification = classification_metrics(
            ts, slice_labels(labels, split.valid_end, split.test_end), choice.tau);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace riskpipe
