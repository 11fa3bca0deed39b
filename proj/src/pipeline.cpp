#include "riskpipe/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "riskpipe/csv.hpp"
#include "riskpipe/factors.hpp"
#include "riskpipe/features.hpp"
#include "riskpipe/harx.hpp"
#include "riskpipe/mlproto.hpp"
#include "riskpipe/plot.hpp"
#include "riskpipe/stats.hpp"

namespace riskpipe {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

namespace {

void require_keys(const json& obj, const std::string& section,
                  const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw ParameterError("config: unknown key '" + section + "." + it.key() + "'");
}

template <typename T>
void maybe(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config file: " + path);
    json root = json::parse(in);

    require_keys(root, "", {"data", "core_selection", "features", "factors", "causality",
                            "var", "harx", "ml", "robust", "runner"});
    RunConfig cfg;

    if (root.contains("data")) {
        const json& d = root["data"];
        require_keys(d, "data", {"assets", "align"});
        if (d.contains("assets")) {
            cfg.assets.clear();
            for (const auto& a : d["assets"]) {
                require_keys(a, "data.assets[]", {"name", "csv"});
                cfg.assets.push_back({a.at("name").get<std::string>(),
                                      a.at("csv").get<std::string>()});
            }
        }
        if (d.contains("align")) {
            const std::string v = d["align"].get<std::string>();
            if (v == "inner")
                cfg.align = AlignPolicy::inner;
            else if (v == "union")
                cfg.align = AlignPolicy::united;
            else
                throw ParameterError("config: data.align must be 'inner' or 'union'");
        }
    }
    if (root.contains("core_selection")) {
        const json& d = root["core_selection"];
        require_keys(d, "core_selection",
                     {"n", "whitelist", "max_lag", "alpha", "pagerank_damping"});
        maybe(d, "n", cfg.core_n);
        maybe(d, "whitelist", cfg.whitelist);
        maybe(d, "max_lag", cfg.network_max_lag);
        maybe(d, "alpha", cfg.network_alpha);
        maybe(d, "pagerank_damping", cfg.pagerank_damping);
    }
    if (root.contains("features")) {
        const json& d = root["features"];
        require_keys(d, "features", {"turnover_fallback_window", "garch_min_obs"});
        maybe(d, "turnover_fallback_window", cfg.turnover_fallback_window);
        maybe(d, "garch_min_obs", cfg.garch_min_obs);
    }
    if (root.contains("factors")) {
        const json& d = root["factors"];
        require_keys(d, "factors",
                     {"pca_cum_variance", "pca_max_components", "crowding_rs_window",
                      "crowding_leave_out", "risk_h", "feat_window", "shock_window"});
        maybe(d, "pca_cum_variance", cfg.pca_cum_variance);
        maybe(d, "pca_max_components", cfg.pca_max_components);
        maybe(d, "crowding_rs_window", cfg.crowding_rs_window);
        if (d.contains("crowding_leave_out"))
            cfg.crowding_leave_out =
                std::set<int>(d["crowding_leave_out"].begin(), d["crowding_leave_out"].end());
        maybe(d, "risk_h", cfg.risk_h);
        maybe(d, "feat_window", cfg.feat_window);
        maybe(d, "shock_window", cfg.shock_window);
    }
    if (root.contains("causality")) {
        const json& d = root["causality"];
        require_keys(d, "causality",
                     {"bic_pmax", "layer_c_fixed_lags", "layer_a_proxies", "layer_b_families"});
        maybe(d, "bic_pmax", cfg.bic_pmax);
        maybe(d, "layer_c_fixed_lags", cfg.layer_c_fixed_lags);
        maybe(d, "layer_a_proxies", cfg.layer_a_proxies);
        maybe(d, "layer_b_families", cfg.layer_b_families);
    }
    if (root.contains("var")) {
        const json& d = root["var"];
        require_keys(d, "var", {"horizons"});
        maybe(d, "horizons", cfg.var_horizons);
    }
    if (root.contains("harx")) {
        const json& d = root["harx"];
        require_keys(d, "harx", {"windows", "nw_lag"});
        maybe(d, "windows", cfg.harx_windows);
        maybe(d, "nw_lag", cfg.harx_nw_lag);
    }
    if (root.contains("ml")) {
        const json& d = root["ml"];
        require_keys(d, "ml",
                     {"max_depth", "learning_rate", "max_rounds", "early_stopping_rounds",
                      "min_child_weight", "lambda", "label_quantile", "split_fractions"});
        maybe(d, "max_depth", cfg.gbt.max_depth);
        maybe(d, "learning_rate", cfg.gbt.learning_rate);
        maybe(d, "max_rounds", cfg.gbt.max_rounds);
        maybe(d, "early_stopping_rounds", cfg.gbt.early_stopping_rounds);
        maybe(d, "min_child_weight", cfg.gbt.min_child_weight);
        maybe(d, "lambda", cfg.gbt.lambda);
        maybe(d, "label_quantile", cfg.label_quantile);
        if (d.contains("split_fractions")) {
            auto v = d["split_fractions"].get<std::vector<double>>();
            if (v.size() != 3) throw ParameterError("config: ml.split_fractions needs 3 values");
            cfg.split_fractions = {v[0], v[1], v[2]};
        }
    }
    if (root.contains("robust")) {
        const json& d = root["robust"];
        require_keys(d, "robust", {"rs_windows", "fixed_lags"});
        maybe(d, "rs_windows", cfg.robust_rs_windows);
        maybe(d, "fixed_lags", cfg.robust_fixed_lags);
    }
    if (root.contains("runner")) {
        const json& d = root["runner"];
        require_keys(d, "runner", {"seed"});
        maybe(d, "seed", cfg.seed);
    }
    return cfg;
}

std::string RunConfig::to_json() const {
    json root;
    json assets = json::array();
    for (const auto& a : this->assets) assets.push_back({{"name", a.name}, {"csv", a.csv}});
    root["data"] = {{"assets", assets},
                    {"align", align == AlignPolicy::inner ? "inner" : "union"}};
    root["core_selection"] = {{"n", core_n},
                              {"whitelist", whitelist},
                              {"max_lag", network_max_lag},
                              {"alpha", network_alpha},
                              {"pagerank_damping", pagerank_damping}};
    root["features"] = {{"turnover_fallback_window", turnover_fallback_window},
                        {"garch_min_obs", garch_min_obs}};
    root["factors"] = {{"pca_cum_variance", pca_cum_variance},
                       {"pca_max_components", pca_max_components},
                       {"crowding_rs_window", crowding_rs_window},
                       {"crowding_leave_out", crowding_leave_out},
                       {"risk_h", risk_h},
                       {"feat_window", feat_window},
                       {"shock_window", shock_window}};
    root["causality"] = {{"bic_pmax", bic_pmax},
                         {"layer_c_fixed_lags", layer_c_fixed_lags},
                         {"layer_a_proxies", layer_a_proxies},
                         {"layer_b_families", layer_b_families}};
    root["var"] = {{"horizons", var_horizons}};
    root["harx"] = {{"windows", harx_windows}, {"nw_lag", harx_nw_lag}};
    root["ml"] = {{"max_depth", gbt.max_depth},
                  {"learning_rate", gbt.learning_rate},
                  {"max_rounds", gbt.max_rounds},
                  {"early_stopping_rounds", gbt.early_stopping_rounds},
                  {"min_child_weight", gbt.min_child_weight},
                  {"lambda", gbt.lambda},
                  {"label_quantile", label_quantile},
                  {"split_fractions", split_fractions}};
    root["robust"] = {{"rs_windows", robust_rs_windows}, {"fixed_lags", robust_fixed_lags}};
    root["runner"] = {{"seed", seed}};
    return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// log / manifest
// ---------------------------------------------------------------------------

void PipelineLog::line(const std::string& stage, const std::string& msg) {
    lines_.push_back("[" + stage + "] " + msg);
}

void PipelineLog::write(const std::string& path) const {
    std::ofstream out(path);
    for (const auto& l : lines_) out << l << "\n";
}

void PipelineLog::append_to(const std::string& path) const {
    std::ofstream out(path, std::ios::app);
    for (const auto& l : lines_) out << l << "\n";
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot hash missing file: " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in.good()) {
        in.read(buf, sizeof(buf));
        EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

std::map<std::string, std::string> build_manifest(const std::string& dir) {
    std::map<std::string, std::string> manifest;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), dir).string();
        if (rel == "manifest.json") continue;
        manifest[rel] = sha256_file(entry.path().string());
    }
    return manifest;
}

void write_manifest(const std::string& dir,
                    const std::map<std::string, std::string>& manifest) {
    json root;
    json files = json::array();
    for (const auto& [path, hash] : manifest) {
        files.push_back({{"path", path},
                         {"sha256", hash},
                         {"bytes", fs::file_size(fs::path(dir) / path)}});
    }
    root["files"] = files;
    std::ofstream out(fs::path(dir) / "manifest.json");
    out << root.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// stage helpers
// ---------------------------------------------------------------------------

namespace {

std::string path_in(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

Series standardize_full(const Series& s) {
    std::vector<double> obs;
    for (double v : s)
        if (!is_missing(v)) obs.push_back(v);
    if (obs.size() < 2) throw SampleSizeError("standardize: too few observations");
    const double m = stats::mean(obs);
    const double sd = stats::sample_std(obs);
    if (!(sd > 0.0)) throw DegenerateVarianceError("standardize: constant series");
    Series out(s.size(), missing());
    for (size_t t = 0; t < s.size(); ++t)
        if (!is_missing(s[t])) out[t] = (s[t] - m) / sd;
    return out;
}

std::vector<std::string> read_core_list(const std::string& dir) {
    CsvTable t = read_csv(path_in(dir, "cores.csv"));
    const int asset_col = t.column("asset");
    const int sel_col = t.column("selected");
    if (asset_col < 0 || sel_col < 0) throw SchemaError("cores.csv missing columns");
    std::vector<std::string> cores;
    for (const auto& row : t.rows)
        if (row[sel_col] == "1") cores.push_back(row[asset_col]);
    return cores;
}

// PCA per column family with a cumulative-variance target capped at
// max_components, appended to `out` as <family>_PC<k> columns.
void append_family_pcs(Panel& out, const Panel& source, const std::string& family,
                       const std::vector<std::string>& member_cols, double cum_variance,
                       int max_components) {
    if (member_cols.empty()) return;
    Panel sub = source.select(member_cols);
    PcaModel model = pca_fit(sub.values(), KeepCumVariance{cum_variance}, member_cols);
    if (model.loadings.cols() > max_components)
        model = pca_fit(sub.values(), KeepK{max_components}, member_cols);
    Eigen::MatrixXd scores = pca_transform(model, sub.values());
    for (Eigen::Index k = 0; k < scores.cols(); ++k) {
        Series s(scores.rows());
        for (Eigen::Index t = 0; t < scores.rows(); ++t) s[t] = scores(t, k);
        out = out.with_column(
            ColumnMeta{family + "_PC" + std::to_string(k + 1), "", ColumnRole::pc}, s);
    }
}

std::vector<std::string> family_members(const Panel& features, const std::string& family,
                                        const std::vector<std::string>& cores) {
    std::vector<std::string> cols;
    if (family == "returns") {
        for (const auto& c : cores) cols.push_back(c + "_ret");
    } else if (family == "resid_vol") {
        for (const auto& c : cores)
            for (const char* suffix : {"_resid_garch_vol", "_resid_park_vol", "_resid_turnover"})
                if (features.has_column(c + std::string(suffix)))
                    cols.push_back(c + std::string(suffix));
    } else if (family == "vol") {
        for (const auto& c : cores)
            for (const char* suffix : {"_garch_vol", "_park_vol"})
                if (features.has_column(c + std::string(suffix)))
                    cols.push_back(c + std::string(suffix));
    } else {
        for (const auto& c : cores)
            if (features.has_column(c + "_" + family)) cols.push_back(c + "_" + family);
    }
    return cols;
}

std::vector<std::string> pc_columns_of(const Panel& p, const std::string& prefix) {
    std::vector<std::pair<int, std::string>> found;
    for (const auto& c : p.columns()) {
        if (c.name.rfind(prefix, 0) != 0) continue;
        const std::string tail = c.name.substr(prefix.size());
        if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos) continue;
        found.push_back({std::stoi(tail), c.name});
    }
    std::sort(found.begin(), found.end());
    std::vector<std::string> out;
    for (auto& [k, name] : found) out.push_back(name);
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

void write_layer_csv(const std::string& path, const std::vector<GrangerResult>& results,
                     GrangerLayer layer) {
    CsvTable t;
    t.header = {"cause", "effect", "lag", "F", "p", "q", "significant_at_0.05",
                "order_rule", "error"};
    for (const auto& r : results) {
        if (r.layer != layer) continue;
        t.rows.push_back({join(r.cause_block, "+"), join(r.effect_block, "+"),
                          std::to_string(r.lag), format_cell(r.F), format_cell(r.p),
                          r.error.empty() ? format_cell(r.q) : "",
                          (!r.error.empty() || is_missing(r.p)) ? ""
                                                                : (r.p < 0.05 ? "1" : "0"),
                          r.order_rule, r.error});
    }
    write_csv(path, t);
}

struct MlData {
    std::vector<Date> dates;
    std::vector<std::string> feature_names;
    Eigen::MatrixXd X;          // lagged features on usable rows
    Series y;                   // forward risk-index target
    Series persistence;         // 1-day-lagged current risk index
    std::vector<int> labels;    // top-quantile regime
    SplitSpec split;
};

MlData assemble_ml_data(const RunConfig& cfg, const Panel& features, const Panel& factors);

}  // namespace

// ---------------------------------------------------------------------------
// stages
// ---------------------------------------------------------------------------

void stage_ingest(const RunConfig& cfg, const std::string& dir, PipelineLog& log) {
    log.line("ingest", "start");
    if (cfg.assets.empty()) throw EmptyInputError("ingest: no assets configured");
    std::vector<Panel> panels;
    for (const auto& a : cfg.assets) {
        Panel p = Panel::load_asset_csv(a.csv, a.name);
        log.line("ingest", "loaded " + a.name + ": " + std::to_string(p.n_rows()) + " rows");
        panels.push_back(std::move(p));
    }
    Panel raw = Panel::align(panels, cfg.align);
    raw.write_csv(path_in(dir, "panel_raw.csv"));
    log.line("ingest", "panel " + std::to_string(raw.n_rows()) + " x " +
                           std::to_string(raw.n_cols()));
    log.line("ingest", "end");
}

void stage_features(const RunConfig& cfg, const std::string& dir, PipelineLog& log) {
    log.line("features", "start");
    Panel raw = Panel::read_csv(path_in(dir, "panel_raw.csv"));

    // Standardized log-returns for every asset in the universe.
    std::vector<std::string> universe;
    for (const auto& a : cfg.assets) universe.push_back(a.name);
    std::vector<ColumnMeta> cols;
    Eigen::MatrixXd vals(raw.n_rows(), universe.size());
    for (size_t j = 0; j < universe.size(); ++j) {
        Series r = standardize_full(log_returns(raw.col(universe[j] + "_close")));
        for (size_t t = 0; t < r.size(); ++t) vals(t, j) = r[t];
        cols.push_back(ColumnMeta{universe[j], universe[j], ColumnRole::ret});
    }
    Panel std_returns(raw.dates(), cols, vals);

    GrangerNetwork net =
        build_granger_network(std_returns, cfg.network_max_lag, cfg.network_alpha);
    for (const auto& s : net.skipped) log.line("features", "network pair skipped: " + s);

    PageRankParams pr;
    pr.damping = cfg.pagerank_damping;
    Eigen::VectorXd scores = pagerank(net.adjacency, pr, /*transpose=*/true);
    std::set<std::string> whitelist(cfg.whitelist.begin(), cfg.whitelist.end());
    const auto cores = select_core(net.nodes, scores, cfg.core_n, whitelist);
    log.line("features", "core set: " + join(cores, ","));

    {
        CsvTable t;
        t.header = {"asset", "pagerank", "selected", "whitelisted"};
        for (size_t i = 0; i < net.nodes.size(); ++i) {
            const bool sel =
                std::find(cores.begin(), cores.end(), net.nodes[i]) != cores.end();
            t.rows.push_back({net.nodes[i], format_cell(scores(i)), sel ? "1" : "0",
                              whitelist.count(net.nodes[i]) ? "1" : "0"});
        }
        write_csv(path_in(dir, "cores.csv"), t);
    }
    {
        CsvTable t;
        t.header = {"from", "to", "edge", "min_p"};
        for (size_t i = 0; i < net.nodes.size(); ++i)
            for (size_t j = 0; j < net.nodes.size(); ++j) {
                if (i == j) continue;
                t.rows.push_back({net.nodes[i], net.nodes[j],
                                  net.adjacency(i, j) != 0.0 ? "1" : "0",
                                  format_cell(net.min_p(i, j))});
            }
        write_csv(path_in(dir, "granger_network.csv"), t);
    }

    FeatureParams fp;
    fp.turnover_fallback_window = cfg.turnover_fallback_window;
    fp.garch_min_obs = cfg.garch_min_obs;
    Panel features = build_lv_features(raw, cores, fp);
    features.write_csv(path_in(dir, "features.csv"));
    log.line("features", "feature panel " + std::to_string(features.n_rows()) + " x " +
                             std::to_string(features.n_cols()));
    log.line("features", "end");
}

void stage_factors(const RunConfig& cfg, const std::string& dir, PipelineLog& log) {
    log.line("factors", "start");
    Panel features = Panel::read_csv(path_in(dir, "features.csv"));
    const auto cores = read_core_list(dir);

    Panel factors(features.dates(), {}, Eigen::MatrixXd(features.n_rows(), 0));

    // Family PCs (returns + LV families + residual block) and the joint
    // volatility group feeding the crowding target.
    const std::vector<std::string> families = {"returns",  "amihud",    "turnover",
                                               "garch_vol", "park_vol", "resid_vol", "vol"};
    for (const auto& fam : families) {
        const auto members = family_members(features, fam, cores);
        append_family_pcs(factors, features, fam, members, cfg.pca_cum_variance,
                          cfg.pca_max_components);
    }
    const auto vol_pcs = pc_columns_of(factors, "vol_PC");
    log.line("factors", "vol PCs: " + std::to_string(vol_pcs.size()));
    if (vol_pcs.empty()) throw EmptyInputError("factors: no volatility PCs");

    Eigen::MatrixXd vol_scores = factors.select(vol_pcs).values();

    CrowdingSpec raw_spec;
    raw_spec.K = static_cast<int>(vol_pcs.size());
    raw_spec.leave_out = cfg.crowding_leave_out;
    Series crowding = crowding_target(vol_scores, raw_spec);
    factors = factors.with_column(ColumnMeta{"mkt_xsec_vol_l2", "", ColumnRole::target},
                                  crowding);

    CrowdingSpec rs_spec = raw_spec;
    rs_spec.standardization = CrowdingStandardization::rolling;
    rs_spec.rolling_window = cfg.crowding_rs_window;
    factors = factors.with_column(
        ColumnMeta{"mkt_xsec_vol_l2_rs" + std::to_string(cfg.crowding_rs_window), "",
                   ColumnRole::target},
        crowding_target(vol_scores, rs_spec));

    // Legacy RV targets from the equal-weighted core return.
    Series market_ret(features.n_rows(), missing());
    for (size_t t = 0; t < features.n_rows(); ++t) {
        double sum = 0.0;
        int n = 0;
        for (const auto& c : cores) {
            const double r = features.values()(t, features.column_index(c + "_ret"));
            if (!is_missing(r)) {
                sum += r;
                ++n;
            }
        }
        if (n == static_cast<int>(cores.size())) market_ret[t] = sum / n;
    }
    auto legacy = legacy_rv_targets(market_ret, cfg.crowding_rs_window);
    factors = factors.with_column(ColumnMeta{"market_rv14", "", ColumnRole::target},
                                  legacy.market_rv14);
    factors = factors.with_column(ColumnMeta{"market_rv14_rs", "", ColumnRole::target},
                                  legacy.market_rv14_rs);

    factors.write_csv(path_in(dir, "factors.csv"));
    log.line("factors", "factor panel " + std::to_string(factors.n_rows()) + " x " +
                            std::to_string(factors.n_cols()));
    log.line("factors", "end");
}

void stage_layers(const RunConfig& cfg, const std::string& dir, PipelineLog& log) {
    log.line("layers", "start");
    Panel features = Panel::read_csv(path_in(dir, "features.csv"));
    Panel factors = Panel::read_csv(path_in(dir, "factors.csv"));

    LayerConfig lc;
    lc.cores = read_core_list(dir);
    lc.layer_a_proxies = cfg.layer_a_proxies;
    lc.layer_b_families = cfg.layer_b_families;
    lc.bic_pmax = cfg.bic_pmax;
    lc.layer_c_fixed_lags = cfg.layer_c_fixed_lags;

    const auto results = run_layers(features, factors, lc);
    int failed = 0;
    for (const auto& r : results)
        if (!r.error.empty()) {
            ++failed;
            log.line("layers", "cell failed (" + join(r.cause_block, "+") + " -> " +
                                   join(r.effect_block, "+") + "): " + r.error);
        }
    write_layer_csv(path_in(dir, "layerA.csv"), results, GrangerLayer::A);
    write_layer_csv(path_in(dir, "layerB.csv"), results, GrangerLayer::B);
    write_layer_csv(path_in(dir, "layerC.csv"), results, GrangerLayer::C);
    log.line("layers", std::to_string(results.size()) + " tests, " + std::to_string(failed) +
                           " failed cells");
    log.line("layers", "end");
}

namespace {

void export_var(const std::string& dir, const std::string& stem, const VarModel& model,
                const std::vector<std::string>& names, int horizons, PipelineLog& log) {
    const auto irf = orth_irf(model, horizons);
    const auto shares = fevd(model, horizons);
    const int n = model.n_vars();

    CsvTable irf_t;
    irf_t.header = {"horizon", "response", "shock", "value"};
    for (int h = 0; h <= horizons; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                irf_t.rows.push_back({std::to_string(h), names[i], names[j],
                                      format_cell(irf[h](i, j))});
    write_csv(path_in(dir, stem + "_irf.csv"), irf_t);

    CsvTable fevd_t;
    fevd_t.header = {"horizon", "response", "shock", "share"};
    for (int h = 0; h < horizons; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                fevd_t.rows.push_back({std::to_string(h + 1), names[i], names[j],
                                       format_cell(shares[h](i, j))});
    write_csv(path_in(dir, stem + "_fevd.csv"), fevd_t);

    CsvTable lb_t;
    lb_t.header = {"variable", "Q", "p"};
    for (int i = 0; i < n; ++i) {
        Series resid(model.residuals.rows());
        for (Eigen::Index t = 0; t < model.residuals.rows(); ++t)
            resid[t] = model.residuals(t, i);
        const auto lb = ljung_box(resid, 10);
        lb_t.rows.push_back({names[i], format_cell(lb.Q), format_cell(lb.p)});
    }
    write_csv(path_in(dir, stem + "_ljungbox.csv"), lb_t);
    log.line("var", stem + ": order " + std::to_string(model.order) + ", spectral radius " +
                        format_cell(companion_spectral_radius(model)));
}

}  // namespace

void stage_var(const RunConfig& cfg, const std::string& dir, PipelineLog& log) {
    log.line("var", "start");
    Panel factors = Panel::read_csv(path_in(dir, "factors.csv"));

    const auto vol_pcs = pc_columns_of(factors, "vol_PC");
    if (vol_pcs.empty()) throw EmptyInputError("var: no volatility PCs in factors.csv");

    // Main block: liquidity summaries, two vol PCs, target last.
    std::vector<std::string> main_block;
    for (const auto& c : {std::string("amihud_PC1"), std::string("turnover_PC1")})
        if (factors.has_column(c)) main_block.push_back(c);
    for (size_t i = 0; i < std::min<size_t>(2, vol_pcs.size()); ++i)
        main_block.push_back(vol_pcs[i]);
    main_block.push_back("mkt_xsec_vol_l2");

    std::vector<std::string> vol_block = vol_pcs;
    vol_block.push_back("mkt_xsec_vol_l2");

    Panel main_panel = factors.select(main_block);
    VarModel main_model = var_fit(main_panel.values(), OrderBic{cfg.bic_pmax}, main_block);
    export_var(dir, "var_main", main_model, main_block, cfg.var_horizons, log);

    Panel vol_panel = factors.select(vol_block);
    VarModel vol_model = var_fit(vol_panel.values(), OrderBic{cfg.bic_pmax}, vol_block);
    export_var(dir, "var_volonly", vol_model, vol_block, cfg.var_horizons, log);

    // Structural shocks from the main VAR, date-aligned.
    Eigen::MatrixXd shocks = structural_shocks(main_model);
    CsvTable shock_t;
    shock_t.header = {"date"};
    for (const auto& n : main_block) shock_t.header.push_back("shock_" + n);
    Eigen::MatrixXd shocks_full = Eigen::MatrixXd::Constant(
        factors.n_rows(), shocks.cols(), missing());
    for (size_t r = 0; r < main_model.sample_rows.size(); ++r)
        shocks_full.row(main_model.sample_rows[r]) = shocks.row(r);
    for (size_t t = 0; t < factors.n_rows(); ++t) {
        std::vector<std::string> row{factors.dates()[t].to_string()};
        for (Eigen::Index j = 0; j < shocks_full.cols(); ++j)
            row.push_back(format_cell(shocks_full(t, j)));
        shock_t.rows.push_back(std::move(row));
    }
    write_csv(path_in(dir, "var_main_shocks.csv"), shock_t);

    // Risk index from vol-PC dispersion plus mean absolute shocks; the
    // factor panel gains risk_idx_H<H>.
    RiskIndexSpec spec;
    spec.H = cfg.risk_h;
    spec.feat_window = cfg.feat_window;
    spec.shock_window = cfg.shock_window;
    Series risk = risk_index(factors.select(vol_pcs).values(), shocks_full, spec);
    factors = factors.with_column(
        ColumnMeta{"risk_idx_H" + std::to_string(cfg.risk_h), "", ColumnRole::target}, risk);
    factors.write_csv(path_in(dir, "factors.csv"));
    log.line("var", "risk index appended to factors.csv");
    log.line("var", "end");
}

void stage_harx(const RunConfig& cfg, const std::string& dir, PipelineLog& log) {
    log.line("harx", "start");
    Panel factors = Panel::read_csv(path_in(dir, "factors.csv"));
    const auto vol_pcs = pc_columns_of(factors, "vol_PC");
    Eigen::MatrixXd v = factors.select(vol_pcs).values();

    std::vector<std::string> targets = {
        "mkt_xsec_vol_l2", "mkt_xsec_vol_l2_rs" + std::to_string(cfg.crowding_rs_window),
        "market_rv14", "market_rv14_rs"};

    CsvTable summary;
    summary.header = {"target", "n_obs", "nw_lag", "r2"};
    for (const auto& target : targets) {
        if (!factors.has_column(target)) {
            log.line("harx", "target missing, skipped: " + target);
            continue;
        }
        std::optional<int> lag;
        if (cfg.harx_nw_lag >= 0) lag = cfg.harx_nw_lag;
        HarxFit fit;
        try {
            fit = harx_fit(factors.col(target), v, lag, cfg.harx_windows);
        } catch (const Error& e) {
            log.line("harx", "fit failed for " + target + ": " + e.what());
            continue;
        }
        CsvTable t;
        t.header = {"regressor", "coefficient", "se", "tstat", "p"};
        std::vector<std::string> reg_names = {"intercept"};
        for (const char* w : {"d", "w", "m"})
            for (const auto& pc : vol_pcs) reg_names.push_back(std::string(w) + "_" + pc);
        for (Eigen::Index i = 0; i < fit.coef.size(); ++i)
            t.rows.push_back({reg_names[i], format_cell(fit.coef(i)),
                              format_cell(fit.hac_se(i)), format_cell(fit.tstats(i)),
                              format_cell(fit.pvals(i))});
        write_csv(path_in(dir, "harx_" + target + ".csv"), t);
        summary.rows.push_back({target, std::to_string(fit.n_obs),
                                std::to_string(fit.nw_lag), format_cell(fit.r2)});
        log.line("harx", target + ": n=" + std::to_string(fit.n_obs) + " r2=" +
                             format_cell(fit.r2));
    }
    write_csv(path_in(dir, "harx_summary.csv"), summary);
    log.line("harx", "end");
}

namespace {

MlData assemble_ml_data(const RunConfig& cfg, const Panel& features, const Panel& factors) {
    const Panel joint = Panel::align({features, factors}, AlignPolicy::inner);
    const std::string risk_col = "risk_idx_H" + std::to_string(cfg.risk_h);
    if (!joint.has_column(risk_col))
        throw LookupError("ml: '" + risk_col + "' not found; run the var stage first");

    // Feature set: every LV column, every PC, and the current risk index;
    // all uniformly lagged one day.
    std::vector<std::string> feature_cols;
    for (const auto& c : features.columns()) feature_cols.push_back(c.name);
    for (const auto& c : factors.columns())
        if (c.name.find("_PC") != std::string::npos) feature_cols.push_back(c.name);
    feature_cols.push_back(risk_col);

    Panel lagged = joint.lag_columns(feature_cols, 1);
    Series y = forward_label(joint.col(risk_col), cfg.risk_h);
    Series persistence = lagged.col(risk_col + "_lag1");

    std::vector<size_t> usable;
    for (size_t t = 0; t < joint.n_rows(); ++t) {
        if (is_missing(y[t])) continue;
        if (lagged.values().row(t).hasNaN()) continue;
        usable.push_back(t);
    }
    if (usable.size() < 60) throw SampleSizeError("ml: fewer than 60 usable rows");

    MlData data;
    data.feature_names = lagged.column_names();
    data.X.resize(usable.size(), lagged.n_cols());
    data.y.resize(usable.size());
    data.persistence.resize(usable.size());
    for (size_t i = 0; i < usable.size(); ++i) {
        data.dates.push_back(joint.dates()[usable[i]]);
        data.X.row(i) = lagged.values().row(usable[i]);
        data.y[i] = y[usable[i]];
        data.persistence[i] = persistence[usable[i]];
    }
    data.split = chrono_split(usable.size(), cfg.split_fractions);
    Series labels = label_top_quantile(data.y, cfg.label_quantile, data.split);
    for (double l : labels) data.labels.push_back(static_cast<int>(l));
    return data;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

void stage_ml(const RunConfig& cfg, const std::string& dir, PipelineLog& log) {
    log.line("ml", "start");
    Panel features = Panel::read_csv(path_in(dir, "features.csv"));
    Panel factors = Panel::read_csv(path_in(dir, "factors.csv"));
    MlData data = assemble_ml_data(cfg, features, factors);
    const SplitSpec& sp = data.split;
    log.line("ml", "usable rows: " + std::to_string(data.y.size()) + " (train " +
                       std::to_string(sp.train_size()) + ", valid " +
                       std::to_string(sp.valid_size()) + ", test " +
                       std::to_string(sp.test_size()) + ")");

    auto rows = [&](size_t begin, size_t end) {
        return data.X.middleRows(begin, end - begin);
    };
    auto yvec = [&](size_t begin, size_t end) {
        Eigen::VectorXd v(end - begin);
        for (size_t i = begin; i < end; ++i) v(i - begin) = data.y[i];
        return v;
    };
    auto lvec = [&](size_t begin, size_t end) {
        Eigen::VectorXd v(end - begin);
        for (size_t i = begin; i < end; ++i) v(i - begin) = data.labels[i];
        return v;
    };
    auto lint = [&](size_t begin, size_t end) {
        return std::vector<int>(data.labels.begin() + begin, data.labels.begin() + end);
    };

    // Regressor on the forward risk index.
    GbtParams reg_params = cfg.gbt;
    reg_params.objective = GbtObjective::squared_error;
    GbtModel reg = gbt_train(rows(0, sp.train_end), yvec(0, sp.train_end),
                             rows(sp.train_end, sp.valid_end), yvec(sp.train_end, sp.valid_end),
                             reg_params);
    log.line("ml", "regressor best_iteration " + std::to_string(reg.best_iteration));

    // Classifier on the top-quantile regime.
    GbtParams cls_params = cfg.gbt;
    cls_params.objective = GbtObjective::logistic;
    GbtModel cls = gbt_train(rows(0, sp.train_end), lvec(0, sp.train_end),
                             rows(sp.train_end, sp.valid_end), lvec(sp.train_end, sp.valid_end),
                             cls_params);
    log.line("ml", "classifier best_iteration " + std::to_string(cls.best_iteration));

    Eigen::VectorXd reg_pred = reg.predict(data.X);
    Eigen::VectorXd cls_score = cls.predict(data.X);

    const auto choice = choose_threshold(
        to_vec(cls_score.segment(sp.train_end, sp.valid_size())),
        lint(sp.train_end, sp.valid_end));
    log.line("ml", "threshold " + format_cell(choice.tau) + " (valid F1 " +
                       format_cell(choice.valid_f1) + ")");

    struct SplitDef {
        const char* name;
        size_t begin, end;
    };
    const SplitDef splits[] = {{"train", 0, sp.train_end},
                               {"valid", sp.train_end, sp.valid_end},
                               {"test", sp.valid_end, sp.test_end}};

    CsvTable metrics;
    metrics.header = {"model", "split", "metric", "value"};
    auto metric = [&](const std::string& model, const std::string& split,
                      const std::string& name, double value) {
        metrics.rows.push_back({model, split, name, format_cell(value)});
    };

    for (const auto& s : splits) {
        EvalReport report = evaluate(
            to_vec(cls_score.segment(s.begin, s.end - s.begin)), lint(s.begin, s.end),
            std::vector<double>(data.y.begin() + s.begin, data.y.begin() + s.end),
            to_vec(reg_pred.segment(s.begin, s.end - s.begin)), choice.tau);
        metric("gbt_reg", s.name, "r2", report.regression.r2);
        metric("gbt_reg", s.name, "mse", report.regression.mse);
        metric("gbt_cls", s.name, "roc_auc", report.classification.roc_auc);
        metric("gbt_cls", s.name, "pr_auc", report.classification.pr_auc);
        metric("gbt_cls", s.name, "f1", report.classification.f1);
        metric("gbt_cls", s.name, "accuracy", report.classification.accuracy);
        metric("gbt_cls", s.name, "tp", report.classification.confusion.tp);
        metric("gbt_cls", s.name, "fp", report.classification.confusion.fp);
        metric("gbt_cls", s.name, "tn", report.classification.confusion.tn);
        metric("gbt_cls", s.name, "fn", report.classification.confusion.fn);

        CsvTable pred;
        pred.header = {"date", "y_true", "y_pred", "score", "label", "pred_label"};
        for (size_t t = s.begin; t < s.end; ++t)
            pred.rows.push_back({data.dates[t].to_string(), format_cell(data.y[t]),
                                 format_cell(reg_pred(t)), format_cell(cls_score(t)),
                                 std::to_string(data.labels[t]),
                                 cls_score(t) >= choice.tau ? "1" : "0"});
        write_csv(path_in(dir, std::string("ml_predictions_") + s.name + ".csv"), pred);
    }
    metric("gbt_cls", "valid", "tau", choice.tau);

    // Baselines under the identical protocol.
    for (const auto& b : baselines(data.X, data.persistence, data.y, data.labels, sp)) {
        if (b.name == "logistic") {
            metric(b.name, "test", "roc_auc", b.test.classification.roc_auc);
            metric(b.name, "test", "pr_auc", b.test.classification.pr_auc);
            metric(b.name, "test", "f1", b.test.classification.f1);
            metric(b.name, "test", "accuracy", b.test.classification.accuracy);
            metric(b.name, "valid", "tau", b.tau);
        } else {
            metric(b.name, "test", "r2", b.test.regression.r2);
            metric(b.name, "test", "mse", b.test.regression.mse);
        }
    }
    write_csv(path_in(dir, "ml_metrics.csv"), metrics);

    // Test-set curves.
    {
        const auto scores = to_vec(cls_score.segment(sp.valid_end, sp.test_size()));
        const auto labels = lint(sp.valid_end, sp.test_end);
        CsvTable roc;
        roc.header = {"fpr", "tpr", "threshold"};
        for (const auto& pt : roc_curve(scores, labels))
            roc.rows.push_back({format_cell(pt.x), format_cell(pt.y),
                                std::isinf(pt.threshold) ? "inf" : format_cell(pt.threshold)});
        write_csv(path_in(dir, "cls_test_roc_curve.csv"), roc);

        CsvTable pr;
        pr.header = {"recall", "precision", "threshold"};
        for (const auto& pt : pr_curve(scores, labels))
            pr.rows.push_back({format_cell(pt.x), format_cell(pt.y),
                               std::isinf(pt.threshold) ? "inf" : format_cell(pt.threshold)});
        write_csv(path_in(dir, "cls_test_pr_curve.csv"), pr);
    }

    // TreeSHAP attributions for the classifier on the test split.
    {
        const auto shap = tree_shap(cls, rows(sp.valid_end, sp.test_end));
        CsvTable t;
        t.header = {"date", "base"};
        for (const auto& n : data.feature_names) t.header.push_back(n);
        for (size_t i = 0; i < sp.test_size(); ++i) {
            std::vector<std::string> row{data.dates[sp.valid_end + i].to_string(),
                                         format_cell(shap.base)};
            for (Eigen::Index j = 0; j < shap.values.cols(); ++j)
                row.push_back(format_cell(shap.values(i, j)));
            t.rows.push_back(std::move(row));
        }
        write_csv(path_in(dir, "shap_values.csv"), t);
    }
    log.line("ml", "end");
}

std::vector<RobustCell> robustness_grid(const Panel& factors, const RunConfig& cfg) {
    const auto vol_pcs = pc_columns_of(factors, "vol_PC");
    if (vol_pcs.empty()) throw EmptyInputError("robustness_grid: no volatility PCs");
    Eigen::MatrixXd vol_scores = factors.select(vol_pcs).values();

    // Raw target plus one RS variant per window.
    std::vector<std::pair<std::string, int>> variants = {{"mkt_xsec_vol_l2", 0}};
    for (int w : cfg.robust_rs_windows)
        variants.push_back({"mkt_xsec_vol_l2_rs" + std::to_string(w), w});

    std::vector<RobustCell> cells;
    for (const auto& [name, window] : variants) {
        Panel panel = factors.select(vol_pcs);
        try {
            CrowdingSpec spec;
            spec.K = static_cast<int>(vol_pcs.size());
            spec.leave_out = cfg.crowding_leave_out;
            if (window > 0) {
                spec.standardization = CrowdingStandardization::rolling;
                spec.rolling_window = window;
            }
            panel = panel.with_column(ColumnMeta{name, "", ColumnRole::target},
                                      crowding_target(vol_scores, spec));
        } catch (const Error& e) {
            for (int lag : cfg.robust_fixed_lags) {
                RobustCell cell;
                cell.target = name;
                cell.rs_window = window;
                cell.lag = lag;
                cell.error = e.what();
                cells.push_back(cell);
            }
            continue;
        }
        for (int lag : cfg.robust_fixed_lags) {
            RobustCell cell;
            cell.target = name;
            cell.rs_window = window;
            cell.lag = lag;
            try {
                const auto res = block_granger(panel, vol_pcs, {name}, OrderFixed{lag});
                cell.F = res.F;
                cell.p = res.p;
            } catch (const Error& e) {
                cell.error = e.what();
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

void stage_robust(const RunConfig& cfg, const std::string& dir, PipelineLog& log) {
    log.line("robust", "start");
    Panel factors = Panel::read_csv(path_in(dir, "factors.csv"));
    const auto cells = robustness_grid(factors, cfg);

    CsvTable t;
    t.header = {"target", "rs_window", "lag", "F", "p", "neg_log10_p", "error"};
    for (const auto& c : cells) {
        const double nl = (!c.error.empty() || is_missing(c.p) || c.p <= 0.0)
                              ? missing()
                              : -std::log10(c.p);
        t.rows.push_back({c.target, std::to_string(c.rs_window), std::to_string(c.lag),
                          format_cell(c.F), format_cell(c.p), format_cell(nl), c.error});
        if (!c.error.empty())
            log.line("robust", "cell failed (" + c.target + ", lag " +
                                   std::to_string(c.lag) + "): " + c.error);
    }
    write_csv(path_in(dir, "robust_layerC_table.csv"), t);
    log.line("robust", std::to_string(cells.size()) + " cells");
    log.line("robust", "end");
}

void stage_report(const RunConfig& cfg, const std::string& dir, PipelineLog& log) {
    log.line("report", "start");

    // Layer A heatmap: rows = cores, columns = proxy -> ret then ret -> proxy.
    try {
        CsvTable t = read_csv(path_in(dir, "layerA.csv"));
        const int cause_col = t.column("cause"), effect_col = t.column("effect"),
                  p_col = t.column("p");
        const auto cores = read_core_list(dir);
        std::vector<std::string> col_labels;
        for (const auto& p : cfg.layer_a_proxies) col_labels.push_back(p + ">ret");
        for (const auto& p : cfg.layer_a_proxies) col_labels.push_back("ret>" + p);

        Eigen::MatrixXd vals = Eigen::MatrixXd::Constant(
            cores.size(), col_labels.size(), missing());
        for (const auto& row : t.rows) {
            for (size_t i = 0; i < cores.size(); ++i) {
                for (size_t j = 0; j < cfg.layer_a_proxies.size(); ++j) {
                    const std::string proxy = cores[i] + "_" + cfg.layer_a_proxies[j];
                    const std::string ret = cores[i] + "_ret";
                    const double p = parse_cell(row[p_col]);
                    const double nl = (is_missing(p) || p <= 0.0) ? missing() : -std::log10(p);
                    if (row[cause_col] == proxy && row[effect_col] == ret)
                        vals(i, j) = nl;
                    else if (row[cause_col] == ret && row[effect_col] == proxy)
                        vals(i, cfg.layer_a_proxies.size() + j) = nl;
                }
            }
        }
        plot::HeatmapSpec spec;
        spec.title = "Layer A block-Granger (-log10 p)";
        spec.row_labels = cores;
        spec.col_labels = col_labels;
        spec.values = vals;
        spec.value_label = "-log10 p";
        plot::write_heatmap(path_in(dir, "heatmap_layerA"), spec);
    } catch (const Error& e) {
        log.line("report", std::string("heatmap_layerA skipped: ") + e.what());
    }

    // Layer C robustness heatmap: rows = target variants, cols = fixed lags.
    try {
        CsvTable t = read_csv(path_in(dir, "robust_layerC_table.csv"));
        const int target_col = t.column("target"), lag_col = t.column("lag"),
                  nl_col = t.column("neg_log10_p");
        std::vector<std::string> targets;
        for (const auto& row : t.rows)
            if (std::find(targets.begin(), targets.end(), row[target_col]) == targets.end())
                targets.push_back(row[target_col]);
        std::vector<int> lags = cfg.robust_fixed_lags;
        Eigen::MatrixXd vals =
            Eigen::MatrixXd::Constant(targets.size(), lags.size(), missing());
        for (const auto& row : t.rows) {
            const auto it = std::find(targets.begin(), targets.end(), row[target_col]);
            const int lag = std::stoi(row[lag_col]);
            const auto lag_it = std::find(lags.begin(), lags.end(), lag);
            if (it != targets.end() && lag_it != lags.end())
                vals(it - targets.begin(), lag_it - lags.begin()) = parse_cell(row[nl_col]);
        }
        plot::HeatmapSpec spec;
        spec.title = "Layer C robustness (-log10 p)";
        spec.row_labels = targets;
        for (int lag : lags) spec.col_labels.push_back("lag " + std::to_string(lag));
        spec.values = vals;
        spec.value_label = "-log10 p";
        plot::write_heatmap(path_in(dir, "robust_summary_layerC_heatmap"), spec);
    } catch (const Error& e) {
        log.line("report", std::string("robust heatmap skipped: ") + e.what());
    }

    // FEVD of the crowding target in the main VAR, stacked by shock.
    try {
        CsvTable t = read_csv(path_in(dir, "var_main_fevd.csv"));
        const int h_col = t.column("horizon"), resp_col = t.column("response"),
                  shock_col = t.column("shock"), share_col = t.column("share");
        std::vector<std::string> shocks;
        int max_h = 0;
        for (const auto& row : t.rows) {
            if (row[resp_col] != "mkt_xsec_vol_l2") continue;
            if (std::find(shocks.begin(), shocks.end(), row[shock_col]) == shocks.end())
                shocks.push_back(row[shock_col]);
            max_h = std::max(max_h, std::stoi(row[h_col]));
        }
        Eigen::MatrixXd shares = Eigen::MatrixXd::Zero(max_h, shocks.size());
        for (const auto& row : t.rows) {
            if (row[resp_col] != "mkt_xsec_vol_l2") continue;
            const auto it = std::find(shocks.begin(), shocks.end(), row[shock_col]);
            shares(std::stoi(row[h_col]) - 1, it - shocks.begin()) =
                parse_cell(row[share_col]);
        }
        plot::StackedAreaSpec spec;
        spec.title = "FEVD of mkt_xsec_vol_l2 (main VAR)";
        spec.x_label = "horizon (days)";
        spec.series = shocks;
        spec.shares = shares;
        plot::write_stacked_area(path_in(dir, "var_main_fevd"), spec);
    } catch (const Error& e) {
        log.line("report", std::string("var_main_fevd plot skipped: ") + e.what());
    }

    // Classifier curves from their CSVs.
    try {
        CsvTable t = read_csv(path_in(dir, "cls_test_roc_curve.csv"));
        plot::CurveSpec spec;
        spec.title = "Test ROC curve";
        spec.x_label = "false positive rate";
        spec.y_label = "TPR";
        spec.diagonal = true;
        for (const auto& row : t.rows) {
            spec.x.push_back(parse_cell(row[0]));
            spec.y.push_back(parse_cell(row[1]));
        }
        plot::write_curve(path_in(dir, "cls_test_roc_curve"), spec);
    } catch (const Error& e) {
        log.line("report", std::string("roc plot skipped: ") + e.what());
    }
    try {
        CsvTable t = read_csv(path_in(dir, "cls_test_pr_curve.csv"));
        plot::CurveSpec spec;
        spec.title = "Test PR curve (threshold frozen from validation)";
        spec.x_label = "recall";
        spec.y_label = "PREC";
        const double prevalence = t.rows.empty() ? 0.0 : parse_cell(t.rows.back()[1]);
        spec.hline = prevalence;
        for (const auto& row : t.rows) {
            spec.x.push_back(parse_cell(row[0]));
            spec.y.push_back(parse_cell(row[1]));
        }
        plot::write_curve(path_in(dir, "cls_test_pr_curve"), spec);
    } catch (const Error& e) {
        log.line("report", std::string("pr plot skipped: ") + e.what());
    }
    log.line("report", "end");
}

// ---------------------------------------------------------------------------
// full pipeline
// ---------------------------------------------------------------------------

namespace {

std::string utc_stamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d%02d%02d_%02d%02d%02d", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

}  // namespace

RunArtifacts run_pipeline(const RunConfig& cfg, const std::string& out_root,
                          const std::string& fixed_dir) {
    const std::string dir = fixed_dir.empty()
                                ? (fs::path(out_root) / ("run_" + utc_stamp())).string()
                                : fixed_dir;
    fs::create_directories(dir);

    {
        std::ofstream out(fs::path(dir) / "config.json");
        out << cfg.to_json();
    }

    PipelineLog log;
    using Stage = void (*)(const RunConfig&, const std::string&, PipelineLog&);
    const std::pair<const char*, Stage> stages[] = {
        {"ingest", stage_ingest}, {"features", stage_features}, {"factors", stage_factors},
        {"layers", stage_layers}, {"var", stage_var},           {"harx", stage_harx},
        {"ml", stage_ml},         {"robust", stage_robust},     {"report", stage_report},
    };
    for (const auto& [name, fn] : stages) {
        try {
            fn(cfg, dir, log);
        } catch (const std::exception& e) {
            log.line(name, std::string("FAILED: ") + e.what());
            log.write((fs::path(dir) / "pipeline.log").string());
            std::ofstream marker(fs::path(dir) / "FAILED");
            marker << "stage: " << name << "\nerror: " << e.what() << "\n";
            write_manifest(dir, build_manifest(dir));
            throw;
        }
    }
    log.write((fs::path(dir) / "pipeline.log").string());

    RunArtifacts artifacts;
    artifacts.dir = dir;
    artifacts.manifest = build_manifest(dir);
    write_manifest(dir, artifacts.manifest);
    return artifacts;
}

std::vector<std::string> documented_artifacts(const RunConfig& cfg) {
    std::vector<std::string> files = {
        "config.json",
        "pipeline.log",
        "panel_raw.csv",
        "cores.csv",
        "granger_network.csv",
        "features.csv",
        "factors.csv",
        "layerA.csv",
        "layerB.csv",
        "layerC.csv",
        "var_main_irf.csv",
        "var_main_fevd.csv",
        "var_main_ljungbox.csv",
        "var_main_shocks.csv",
        "var_volonly_irf.csv",
        "var_volonly_fevd.csv",
        "var_volonly_ljungbox.csv",
        "harx_mkt_xsec_vol_l2.csv",
        "harx_mkt_xsec_vol_l2_rs" + std::to_string(cfg.crowding_rs_window) + ".csv",
        "harx_market_rv14.csv",
        "harx_market_rv14_rs.csv",
        "harx_summary.csv",
        "ml_predictions_train.csv",
        "ml_predictions_valid.csv",
        "ml_predictions_test.csv",
        "ml_metrics.csv",
        "shap_values.csv",
        "cls_test_roc_curve.csv",
        "cls_test_pr_curve.csv",
        "robust_layerC_table.csv",
        "heatmap_layerA.svg",
        "heatmap_layerA.png",
        "robust_summary_layerC_heatmap.svg",
        "robust_summary_layerC_heatmap.png",
        "var_main_fevd.svg",
        "var_main_fevd.png",
        "cls_test_roc_curve.svg",
        "cls_test_roc_curve.png",
        "cls_test_pr_curve.svg",
        "cls_test_pr_curve.png",
    };
    return files;
}

}  // namespace riskpipe
