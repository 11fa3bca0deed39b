#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "riskpipe/causality.hpp"
#include "riskpipe/gbt.hpp"
#include "riskpipe/panel.hpp"

namespace riskpipe {

struct AssetSource {
    std::string name;
    std::string csv;
};

// Fully serializable run configuration; unknown keys in the file are errors.
struct RunConfig {
    // data
    std::vector<AssetSource> assets;
    AlignPolicy align = AlignPolicy::inner;

    // core selection
    int core_n = 7;
    std::vector<std::string> whitelist = {"BTC", "ETH", "BNB"};
    int network_max_lag = 5;
    double network_alpha = 0.05;
    double pagerank_damping = 0.85;

    // features
    int turnover_fallback_window = 252;
    int garch_min_obs = 250;

    // factors
    double pca_cum_variance = 0.85;
    int pca_max_components = 3;
    int crowding_rs_window = 252;
    std::set<int> crowding_leave_out;
    int risk_h = 10;
    int feat_window = 5;
    int shock_window = 5;

    // causality
    int bic_pmax = 10;
    std::vector<int> layer_c_fixed_lags = {1, 2, 3, 4, 5};
    std::vector<std::string> layer_a_proxies = {"amihud", "turnover", "resid_garch_vol",
                                                "resid_park_vol", "resid_turnover"};
    std::vector<std::string> layer_b_families = {"amihud", "turnover", "garch_vol",
                                                 "park_vol", "resid_vol"};

    // var
    int var_horizons = 20;

    // harx
    std::vector<int> harx_windows = {1, 5, 22};
    int harx_nw_lag = -1;  // -1 = automatic

    // ml
    GbtParams gbt;
    double label_quantile = 0.85;
    std::array<double, 3> split_fractions = {0.7, 0.15, 0.15};

    // robustness grid
    std::vector<int> robust_rs_windows = {63, 126, 252};  // raw row is always included
    std::vector<int> robust_fixed_lags = {1, 2, 3, 4, 5};

    // runner
    uint64_t seed = 42;

    static RunConfig from_json_file(const std::string& path);
    std::string to_json() const;  // deterministic (sorted keys)
};

struct RunArtifacts {
    std::string dir;                               // .../run_<UTC stamp>
    std::map<std::string, std::string> manifest;   // relative path -> sha256
};

class PipelineLog {
public:
    void line(const std::string& stage, const std::string& msg);
    void write(const std::string& path) const;
    void append_to(const std::string& path) const;
    const std::vector<std::string>& lines() const { return lines_; }

private:
    std::vector<std::string> lines_;
};

// Individual stages; each communicates with the others only through the CSV
// files inside `dir`.
void stage_ingest(const RunConfig& cfg, const std::string& dir, PipelineLog& log);
void stage_features(const RunConfig& cfg, const std::string& dir, PipelineLog& log);
void stage_factors(const RunConfig& cfg, const std::string& dir, PipelineLog& log);
void stage_layers(const RunConfig& cfg, const std::string& dir, PipelineLog& log);
void stage_var(const RunConfig& cfg, const std::string& dir, PipelineLog& log);
void stage_harx(const RunConfig& cfg, const std::string& dir, PipelineLog& log);
void stage_ml(const RunConfig& cfg, const std::string& dir, PipelineLog& log);
void stage_robust(const RunConfig& cfg, const std::string& dir, PipelineLog& log);
void stage_report(const RunConfig& cfg, const std::string& dir, PipelineLog& log);

// Runs every stage into a fresh run_<stamp> directory under out_root (or into
// `fixed_dir` when given), then writes config.json, pipeline.log and
// manifest.json. On stage failure a FAILED marker is left behind and the
// error is rethrown.
RunArtifacts run_pipeline(const RunConfig& cfg, const std::string& out_root,
                          const std::string& fixed_dir = "");

// Manifest of every file under dir (except manifest.json), sorted by path.
std::map<std::string, std::string> build_manifest(const std::string& dir);
void write_manifest(const std::string& dir,
                    const std::map<std::string, std::string>& manifest);

std::string sha256_file(const std::string& path);

// Layer-C p-values across target variants (raw + each RS window) and fixed
// lags; used by stage_robust and directly testable.
struct RobustCell {
    std::string target;
    int rs_window = 0;  // 0 = raw target
    int lag = 0;
    double F = missing();
    double p = missing();
    std::string error;
};
std::vector<RobustCell> robustness_grid(const Panel& factors, const RunConfig& cfg);

// Names every stage may emit, for the manifest census.
std::vector<std::string> documented_artifacts(const RunConfig& cfg);

}  // namespace riskpipe
