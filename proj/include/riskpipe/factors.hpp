#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "riskpipe/panel.hpp"

namespace riskpipe {

// Number of components: fixed k, or smallest k reaching a cumulative
// explained-variance fraction.
struct KeepK {
    int k;
};
struct KeepCumVariance {
    double fraction;
};
using PcaKeep = std::variant<KeepK, KeepCumVariance>;

struct PcaModel {
    Eigen::VectorXd means;            // per input column
    Eigen::VectorXd stds;             // per input column, sample (n-1)
    Eigen::MatrixXd loadings;         // columns x k, orthonormal
    Eigen::VectorXd explained_ratio;  // k entries, non-increasing
    std::vector<std::string> input_columns;
};

// PCA on the correlation matrix of listwise-complete rows. Loading sign
// convention: the largest-|entry| of each column is positive.
PcaModel pca_fit(const Eigen::MatrixXd& x, const PcaKeep& keep,
                 const std::vector<std::string>& column_names = {});

// scores = standardized(x) * loadings. Rows with any missing input give
// missing scores.
Eigen::MatrixXd pca_transform(const PcaModel& m, const Eigen::MatrixXd& x);

enum class CrowdingStandardization { full_sample, rolling };

struct CrowdingSpec {
    int K = 0;  // 0 = use all score columns
    CrowdingStandardization standardization = CrowdingStandardization::full_sample;
    int rolling_window = 252;
    std::set<int> leave_out;  // 1-based PC indices to exclude
};

// sqrt( (1/K') sum_k z_k(t)^2 ) over retained standardized vol-PC scores.
Series crowding_target(const Eigen::MatrixXd& vol_pc_scores, const CrowdingSpec& spec);

struct LegacyRvTargets {
    Series market_rv14;
    Series market_rv14_rs;
};

// rv14_t = sqrt( sum_{h=0..13} r_{t-h}^2 ) plus its rolling-standardized
// variant over rs_window days.
LegacyRvTargets legacy_rv_targets(const Series& market_return, int rs_window = 252);

struct RiskIndexSpec {
    int H = 10;
    int feat_window = 5;
    int shock_window = 5;
};

// risk_idx_H(t) = (1/H) sum_{h=1..H} ( sigma_feat(t-h+1) + mean_abs_shock(t-h+1) )
// where sigma_feat is the trailing std of the cross-feature mean and
// mean_abs_shock the trailing mean of the cross-equation mean |shock|.
Series risk_index(const Eigen::MatrixXd& features, const Eigen::MatrixXd& structural_shocks,
                  const RiskIndexSpec& spec);

// Forward label: value at t is s[t+H]; the last H entries are missing.
Series forward_label(const Series& s, int horizon);

}  // namespace riskpipe
