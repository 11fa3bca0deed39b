#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "riskpipe/gbt.hpp"
#include "riskpipe/panel.hpp"

namespace riskpipe {

// Contiguous chronological ranges, half-open, train < valid < test.
struct SplitSpec {
    size_t train_begin = 0;
    size_t train_end = 0;   // = valid_begin
    size_t valid_end = 0;   // = test_begin
    size_t test_end = 0;

    size_t train_size() const { return train_end - train_begin; }
    size_t valid_size() const { return valid_end - train_end; }
    size_t test_size() const { return test_end - valid_end; }
};

// Boundaries at floor(f1 n) and floor((f1+f2) n); remainder to test.
SplitSpec chrono_split(size_t n, std::array<double, 3> fractions = {0.7, 0.15, 0.15});

// Nearest-rank q-quantile cut computed on the train segment only; label is
// 1 iff risk > cut (strict), everywhere. Missing risk gives missing label.
Series label_top_quantile(const Series& risk, double q, const SplitSpec& split);

struct ThresholdChoice {
    double tau = 0.0;
    double valid_f1 = 0.0;
    std::string candidate_grid;
};

// Grid = sorted unique scores plus midpoints; maximizes F1 with predicate
// score >= tau; ties resolve to the smaller tau.
ThresholdChoice choose_threshold(const std::vector<double>& scores,
                                 const std::vector<int>& labels);

struct Confusion {
    int tp = 0, fp = 0, tn = 0, fn = 0;
};

struct RegressionMetrics {
    double r2 = 0.0;
    double mse = 0.0;
};

struct ClassificationMetrics {
    double roc_auc = 0.0;
    double pr_auc = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    Confusion confusion;
    bool auc_defined = true;  // false when labels are single-class
};

struct EvalReport {
    RegressionMetrics regression;
    ClassificationMetrics classification;
};

double f1_score(const std::vector<int>& labels, const std::vector<int>& preds);

// Tie-aware rank AUC.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Step interpolation of the precision-recall curve.
double pr_auc(const std::vector<double>& scores, const std::vector<int>& labels);

RegressionMetrics regression_metrics(const std::vector<double>& y_true,
                                     const std::vector<double>& y_pred);

ClassificationMetrics classification_metrics(const std::vector<double>& scores,
                                             const std::vector<int>& labels, double tau);

EvalReport evaluate(const std::vector<double>& scores, const std::vector<int>& labels,
                    const std::vector<double>& y_true, const std::vector<double>& y_pred,
                    double tau);

// ROC / PR curve points for export.
struct CurvePoint {
    double x = 0.0;  // FPR or recall
    double y = 0.0;  // TPR or precision
    double threshold = 0.0;
};
std::vector<CurvePoint> roc_curve(const std::vector<double>& scores,
                                  const std::vector<int>& labels);
std::vector<CurvePoint> pr_curve(const std::vector<double>& scores,
                                 const std::vector<int>& labels);

struct LogisticFit {
    Eigen::VectorXd beta;  // intercept first
    bool converged = false;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

// IRLS with a small ridge for numerical stability.
LogisticFit logistic_fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                         int max_iter = 200, double ridge = 1e-6);

struct BaselineReport {
    std::string name;
    EvalReport test;
    double tau = missing();  // classifiers only
};

// AR(H)-persistence and HAR-X level baselines on `persistence` (the current
// value of the forecast target's index), and a logistic classifier on the
// same lagged feature matrix. All use the shared split and labels.
std::vector<BaselineReport> baselines(const Eigen::MatrixXd& X, const Series& persistence,
                                      const Series& y, const std::vector<int>& labels,
                                      const SplitSpec& split);

}  // namespace riskpipe
