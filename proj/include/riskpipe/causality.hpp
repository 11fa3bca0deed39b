#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "riskpipe/panel.hpp"
#include "riskpipe/varmodel.hpp"

namespace riskpipe {

struct GrangerPair {
    double F = 0.0;
    double p = 1.0;
    int df1 = 0;
    int df2 = 0;
};

// Does x help predict y beyond y's own `lag` lags?
// Restricted:   y_t ~ 1 + y_{t-1..t-lag}
// Unrestricted: adds x_{t-1..t-lag}
// F = ((RSS_r - RSS_u)/lag) / (RSS_u/(T_eff - 2 lag - 1))
GrangerPair granger_pair(const Series& x, const Series& y, int lag);

enum class GrangerLayer { A, B, C };

struct GrangerResult {
    std::vector<std::string> cause_block;
    std::vector<std::string> effect_block;
    int lag = 0;
    double F = 0.0;
    double p = 1.0;
    double q = 1.0;
    GrangerLayer layer = GrangerLayer::A;
    std::string order_rule;  // "bic" or "fixed"
    std::string error;       // non-empty when the cell failed
};

// Joint F-test that every lag of the cause block is zero in the effect-block
// equations of a VAR on cause+effect. RSS is stacked across effect
// equations: restriction count q = n_cause * p * n_effect and residual dof
// n_effect * (T_eff - 1 - p*(n_cause+n_effect)).
GrangerResult block_granger(const Panel& panel, const std::vector<std::string>& cause_block,
                            const std::vector<std::string>& effect_block, const VarOrder& order);

// Benjamini-Hochberg step-up q-values, capped at 1, in input order.
std::vector<double> bh_fdr(const std::vector<double>& pvals);

struct GrangerNetwork {
    std::vector<std::string> nodes;
    Eigen::MatrixXd adjacency;  // 1.0 where i -> j
    Eigen::MatrixXd min_p;      // min over lags, NaN where the pair was skipped
    std::vector<std::string> skipped;
};

// Directed network on standardized returns: edge i->j iff
// min over lags 1..max_lag of granger_pair(x_i, x_j, lag).p < alpha.
GrangerNetwork build_granger_network(const Panel& std_returns, int max_lag = 5,
                                     double alpha = 0.05);

struct PageRankParams {
    double damping = 0.85;
    double tol = 1e-10;
    int max_iter = 1000;
};

// Power iteration on the column-stochastic link matrix; dangling nodes link
// to every node. Scores sum to 1.
Eigen::VectorXd pagerank(const Eigen::MatrixXd& adjacency, const PageRankParams& params = {},
                         bool transpose = false);

// Top-N by score with whitelist members force-included; ties break toward
// the lexicographically smaller name. Output sorted by (score desc, name).
std::vector<std::string> select_core(const std::vector<std::string>& nodes,
                                     const Eigen::VectorXd& scores, int N,
                                     const std::set<std::string>& whitelist);

struct LayerConfig {
    std::vector<std::string> cores;
    // Layer A: per-core LV proxy column suffixes, tested against the core's
    // own return in both directions.
    std::vector<std::string> layer_a_proxies = {"amihud", "turnover", "resid_garch_vol",
                                                "resid_park_vol", "resid_turnover"};
    // Layer B: LV factor families whose PCs are tested against return PCs.
    std::vector<std::string> layer_b_families = {"amihud", "turnover", "garch_vol",
                                                 "park_vol", "resid_vol"};
    std::string vol_pc_prefix = "vol_PC";
    std::string returns_pc_prefix = "returns_PC";
    std::string crowding_column = "mkt_xsec_vol_l2";
    int bic_pmax = 10;
    std::vector<int> layer_c_fixed_lags = {1, 2, 3, 4, 5};
};

// Layer A: per-core proxy <-> own return, both directions.
// Layer B: LV-family PC block -> each return PC, and returns-PC block ->
//          each LV-family PC.
// Layer C: vol-PC block -> crowding target at BIC order plus fixed lags.
// q is computed within each layer; failed cells carry an error note and are
// excluded from FDR.
std::vector<GrangerResult> run_layers(const Panel& features, const Panel& factors,
                                      const LayerConfig& config);

}  // namespace riskpipe
