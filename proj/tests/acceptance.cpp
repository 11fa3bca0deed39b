// Acceptance suite: runs each criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit status = number of failures.
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <vector>

#include "riskpipe/causality.hpp"
#include "riskpipe/factors.hpp"
#include "riskpipe/features.hpp"
#include "riskpipe/garch.hpp"
#include "riskpipe/gbt.hpp"
#include "riskpipe/harx.hpp"
#include "riskpipe/mlproto.hpp"
#include "riskpipe/pipeline.hpp"
#include "riskpipe/rng.hpp"
#include "riskpipe/stats.hpp"
#include "riskpipe/varmodel.hpp"

using namespace riskpipe;
namespace fs = std::filesystem;

namespace {

struct Checker {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

Panel make_panel(const std::vector<std::pair<std::string, Series>>& cols) {
    const size_t T = cols.front().second.size();
    std::vector<Date> dates;
    for (size_t t = 0; t < T; ++t) dates.emplace_back(static_cast<int>(t));
    std::vector<ColumnMeta> metas;
    Eigen::MatrixXd vals(T, cols.size());
    for (size_t j = 0; j < cols.size(); ++j) {
        metas.push_back({cols[j].first, "", ColumnRole::feature});
        for (size_t t = 0; t < T; ++t) vals(t, j) = cols[j].second[t];
    }
    return Panel(dates, metas, vals);
}

// --------------------------------------------------------------------------
// 1. statistical size
// --------------------------------------------------------------------------
Checker criterion_size() {
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    const int n_seeds = 500, T = 500;

    int rej_pair = 0, rej_block = 0, rej_lb = 0;
    for (int s = 0; s < n_seeds; ++s) {
        Rng rng(100000 + s);
        Series x(T), y(T), a(T), b(T), z(T), lb(T);
        for (int t = 0; t < T; ++t) {
            x[t] = rng.normal();
            y[t] = rng.normal();
            a[t] = rng.normal();
            b[t] = rng.normal();
            z[t] = 0.3 * (t >= 1 ? z[t - 1] : 0.0) + rng.normal();
            lb[t] = rng.normal();
        }
        if (granger_pair(x, y, 1).p < 0.05) ++rej_pair;
        Panel panel = make_panel({{"a", a}, {"b", b}, {"z", z}});
        if (block_granger(panel, {"a", "b"}, {"z"}, OrderFixed{2}).p < 0.05) ++rej_block;
        if (ljung_box(lb, 10).p < 0.05) ++rej_lb;
    }
    const double rp = rej_pair / 500.0, rb = rej_block / 500.0, rl = rej_lb / 500.0;
    c.expect(rp >= 0.02 && rp <= 0.09, "granger_pair size " + std::to_string(rp));
    c.expect(rb >= 0.02 && rb <= 0.09, "block_granger size " + std::to_string(rb));
    c.expect(rl >= 0.02 && rl <= 0.09, "ljung_box size " + std::to_string(rl));

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(elapsed < 120.0, "size simulations took " + std::to_string(elapsed) + "s");
    c.detail += " (pair " + std::to_string(rp) + ", block " + std::to_string(rb) +
                ", lb " + std::to_string(rl) + ", " + std::to_string(elapsed) + "s)";
    return c;
}

// --------------------------------------------------------------------------
// 2. statistical power
// --------------------------------------------------------------------------
Checker criterion_power() {
    Checker c;
    int det_pair = 0, det_block = 0;
    for (int s = 0; s < 200; ++s) {
        Rng rng(200000 + s);
        const int T = 1000;
        Series x(T), y(T);
        for (int t = 0; t < T; ++t) {
            x[t] = rng.normal();
            y[t] = 0.8 * (t >= 1 ? x[t - 1] : 0.0) + rng.normal();
        }
        if (granger_pair(x, y, 1).p < 0.01) ++det_pair;
    }
    for (int s = 0; s < 200; ++s) {
        Rng rng(300000 + s);
        const int T = 2000;
        Series a(T), b(T), y(T);
        for (int t = 0; t < T; ++t) {
            a[t] = rng.normal();
            b[t] = rng.normal();
            y[t] = rng.normal();
            if (t >= 1) y[t] += 0.4 * a[t - 1] + 0.4 * b[t - 1] + 0.2 * y[t - 1];
        }
        Panel panel = make_panel({{"a", a}, {"b", b}, {"y", y}});
        if (block_granger(panel, {"a", "b"}, {"y"}, OrderFixed{1}).p < 0.01) ++det_block;
    }
    c.expect(det_pair >= 190, "granger_pair power " + std::to_string(det_pair) + "/200");
    c.expect(det_block >= 190, "block_granger power " + std::to_string(det_block) + "/200");

    // Planted vol-PC DGP: signed score levels drive next-period volatility,
    // content the magnitude-only crowding lags cannot carry, so every
    // robustness-grid cell must light up.
    {
        Rng rng(11111);
        const int T = 1500;
        Series v1(T), v2(T);
        v1[0] = rng.normal();
        v2[0] = rng.normal();
        for (int t = 1; t < T; ++t) {
            v1[t] = std::exp(0.8 * std::tanh(v1[t - 1])) * rng.normal();
            v2[t] = std::exp(0.8 * std::tanh(v2[t - 1])) * rng.normal();
        }
        Panel factors = make_panel({{"vol_PC1", v1}, {"vol_PC2", v2}});
        RunConfig cfg;
        cfg.robust_rs_windows = {60, 120};
        cfg.robust_fixed_lags = {1, 2, 3, 4, 5};
        const auto cells = robustness_grid(factors, cfg);
        c.expect(cells.size() == 15, "grid size " + std::to_string(cells.size()));
        for (const auto& cell : cells) {
            c.expect(cell.error.empty(), cell.target + " failed: " + cell.error);
            if (cell.error.empty())
                c.expect(-std::log10(std::max(cell.p, 1e-300)) > 1.3,
                         cell.target + " lag " + std::to_string(cell.lag) + " p=" +
                             std::to_string(cell.p));
        }
    }
    c.detail += " (pair " + std::to_string(det_pair) + "/200, block " +
                std::to_string(det_block) + "/200)";
    return c;
}

// --------------------------------------------------------------------------
// 3. linear-algebra oracles
// --------------------------------------------------------------------------
Checker criterion_var() {
    Checker c;
    Eigen::MatrixXd A(2, 2);
    A << 0.5, 0.0, 0.3, 0.2;

    auto simulate = [&](int T, uint64_t seed) {
        Rng rng(seed);
        Eigen::MatrixXd y(T, 2);
        Eigen::VectorXd state = Eigen::VectorXd::Zero(2);
        for (int t = 0; t < T; ++t) {
            Eigen::VectorXd z(2);
            z << rng.normal(), rng.normal();
            state = A * state + z;
            y.row(t) = state.transpose();
        }
        return y;
    };

    {
        VarModel m = var_fit(simulate(5000, 1), OrderFixed{1});
        c.expect((m.coeffs[0] - A).cwiseAbs().maxCoeff() < 0.05, "VAR(1) coefficients");
    }
    {
        int correct = 0;
        for (int s = 0; s < 100; ++s)
            if (var_fit(simulate(5000, 500 + s), OrderBic{6}).order == 1) ++correct;
        c.expect(correct >= 90, "BIC picked order 1 in " + std::to_string(correct) + "/100");
        c.detail += " (bic " + std::to_string(correct) + "/100)";
    }
    {
        VarModel m = var_fit(simulate(3000, 77), OrderFixed{1});
        auto irf = orth_irf(m, 12);
        Eigen::LLT<Eigen::MatrixXd> llt(m.resid_cov);
        Eigen::MatrixXd P = llt.matrixL();
        Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(2, 2);
        double max_err = (irf[0] - P).cwiseAbs().maxCoeff();
        for (int h = 1; h <= 12; ++h) {
            phi = (m.coeffs[0] * phi).eval();
            max_err = std::max(max_err, (irf[h] - phi * P).cwiseAbs().maxCoeff());
        }
        c.expect(max_err < 1e-10, "IRF recursion error " + std::to_string(max_err));

        auto shares = fevd(m, 20);
        for (const auto& s : shares)
            for (int i = 0; i < 2; ++i)
                c.expect(std::abs(s.row(i).sum() - 1.0) < 1e-8, "FEVD row sum");

        Eigen::MatrixXd u = structural_shocks(var_fit(simulate(5000, 99), OrderFixed{1}));
        Eigen::MatrixXd cov = u.transpose() * u / static_cast<double>(u.rows() - 1);
        c.expect((cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.05,
                 "structural shocks not whitened");
    }
    return c;
}

// --------------------------------------------------------------------------
// 4. estimator oracles
// --------------------------------------------------------------------------
Checker criterion_estimators() {
    Checker c;
    {
        const double omega = 0.1, alpha = 0.1, beta = 0.8;
        Rng rng(42424);
        const int T = 5000;
        Series r(T);
        double sigma2 = omega / (1.0 - alpha - beta);
        double eps = std::sqrt(sigma2) * rng.normal();
        r[0] = eps;
        for (int t = 1; t < T; ++t) {
            sigma2 = omega + alpha * eps * eps + beta * sigma2;
            eps = std::sqrt(sigma2) * rng.normal();
            r[t] = eps;
        }
        GarchFit fit = garch11_fit(r);
        c.expect(std::abs(fit.alpha - alpha) < 0.05,
                 "garch alpha " + std::to_string(fit.alpha));
        c.expect(std::abs(fit.beta - beta) < 0.05, "garch beta " + std::to_string(fit.beta));
        c.detail += " (garch a=" + std::to_string(fit.alpha) +
                    " b=" + std::to_string(fit.beta) + ")";
    }
    {
        Rng rng(20);
        const int T = 400;
        Eigen::MatrixXd v(T, 2);
        for (int t = 0; t < T; ++t) {
            v(t, 0) = rng.normal();
            v(t, 1) = rng.normal();
        }
        Eigen::MatrixXd regs = har_regressors(v, {1, 5, 22});
        const Eigen::VectorXd bd = (Eigen::VectorXd(2) << 1.5, -0.5).finished();
        const Eigen::VectorXd bw = (Eigen::VectorXd(2) << 0.8, 0.2).finished();
        const Eigen::VectorXd bm = (Eigen::VectorXd(2) << -1.1, 0.4).finished();
        Series y(T, missing());
        for (int t = 1; t < T; ++t) {
            if (regs.row(t - 1).hasNaN()) continue;
            y[t] = 0.7 + (regs.block(t - 1, 0, 1, 2) * bd).value() +
                   (regs.block(t - 1, 2, 1, 2) * bw).value() +
                   (regs.block(t - 1, 4, 1, 2) * bm).value();
        }
        HarxFit fit = harx_fit(y, v);
        double err = std::abs(fit.beta0 - 0.7);
        for (int k = 0; k < 2; ++k) {
            err = std::max(err, std::abs(fit.beta_d(k) - bd(k)));
            err = std::max(err, std::abs(fit.beta_w(k) - bw(k)));
            err = std::max(err, std::abs(fit.beta_m(k) - bm(k)));
        }
        c.expect(err < 1e-8, "HAR-X exact recovery error " + std::to_string(err));
    }
    {
        // NW at L = 0 equals the heteroskedasticity-only sandwich.
        Rng rng(8);
        const int T = 300;
        Eigen::MatrixXd v(T, 1);
        Series y(T);
        for (int t = 0; t < T; ++t) {
            v(t, 0) = rng.normal();
            y[t] = 0.5 + rng.normal() * (1.0 + 0.5 * std::abs(v(t, 0)));
        }
        HarxFit fit = harx_fit(y, v, 0);
        Eigen::MatrixXd regs = har_regressors(v, {1, 5, 22});
        std::vector<int> rows;
        for (int t = 1; t < T; ++t)
            if (!is_missing(y[t]) && !regs.row(t - 1).hasNaN()) rows.push_back(t);
        const int n = static_cast<int>(rows.size());
        Eigen::MatrixXd X(n, 4);
        Eigen::VectorXd Y(n);
        for (int r = 0; r < n; ++r) {
            X(r, 0) = 1.0;
            X.block(r, 1, 1, 3) = regs.row(rows[r] - 1);
            Y(r) = y[rows[r]];
        }
        Eigen::VectorXd beta = (X.transpose() * X).ldlt().solve(X.transpose() * Y);
        Eigen::VectorXd u = Y - X * beta;
        Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(4, 4);
        for (int r = 0; r < n; ++r)
            meat += u(r) * u(r) * X.row(r).transpose() * X.row(r);
        Eigen::MatrixXd bread =
            (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(4, 4));
        const double err = (fit.hac_cov - bread * meat * bread).cwiseAbs().maxCoeff();
        c.expect(err < 1e-10, "NW(0) vs HC0 error " + std::to_string(err));
    }
    {
        const auto q = bh_fdr({0.001, 0.01, 0.03, 0.04, 0.9});
        const double expected[] = {0.005, 0.025, 0.05, 0.05, 0.9};
        for (int i = 0; i < 5; ++i)
            c.expect(std::abs(q[i] - expected[i]) < 1e-12, "BH-FDR step-up example");
    }
    return c;
}

// --------------------------------------------------------------------------
// 5. formula spot checks
// --------------------------------------------------------------------------
Checker criterion_formulas() {
    Checker c;
    {
        const double ratio = std::exp(2.0 * std::sqrt(std::log(2.0)));
        Series s = parkinson_vol({ratio}, {1.0});
        c.expect(std::abs(s[0] - 1.0) < 1e-12, "parkinson unit point");
    }
    {
        // Exactly standardized two-column scores with first row (3, 4).
        const int pairs = 50, T = 2 + 2 * pairs;
        Eigen::MatrixXd scores(T, 2);
        const double first[2] = {3.0, 4.0};
        for (int j = 0; j < 2; ++j) {
            const double v = first[j];
            const double fill = std::sqrt((T - 1 - 2.0 * v * v) / (2.0 * pairs));
            scores(0, j) = v;
            scores(1, j) = -v;
            for (int k = 0; k < pairs; ++k) {
                scores(2 + 2 * k, j) = fill;
                scores(3 + 2 * k, j) = -fill;
            }
        }
        CrowdingSpec spec;
        spec.K = 2;
        Series target = crowding_target(scores, spec);
        c.expect(std::abs(target[0] - std::sqrt(25.0 / 2.0)) < 1e-9,
                 "crowding sqrt(25/2), got " + std::to_string(target[0]));
    }
    {
        Eigen::MatrixXd complete = Eigen::MatrixXd::Ones(4, 4);
        complete.diagonal().setZero();
        Eigen::VectorXd s = pagerank(complete);
        for (int i = 0; i < 4; ++i)
            c.expect(s(i) == 0.25, "complete-graph pagerank not exactly uniform");

        Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(5, 5);
        adj(0, 1) = adj(0, 2) = 1;
        adj(1, 2) = 1;
        adj(2, 0) = 1;
        adj(3, 2) = adj(3, 4) = 1;
        PageRankParams params;
        Eigen::VectorXd got = pagerank(adj, params);
        const int n = 5;
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            const double deg = adj.row(i).sum();
            for (int j = 0; j < n; ++j) P(j, i) = deg > 0 ? adj(i, j) / deg : 1.0 / n;
        }
        Eigen::VectorXd oracle =
            (Eigen::MatrixXd::Identity(n, n) - params.damping * P)
                .fullPivLu()
                .solve(Eigen::VectorXd::Constant(n, (1.0 - params.damping) / n));
        oracle /= oracle.sum();
        c.expect((got - oracle).cwiseAbs().maxCoeff() < 1e-8, "pagerank dense-solve oracle");
    }
    return c;
}

// --------------------------------------------------------------------------
// 6. ML protocol
// --------------------------------------------------------------------------
Checker criterion_ml() {
    Checker c;
    {
        // Leakage probe through the pipeline's own machinery: a row-ordinal
        // feature must arrive lagged to t-1, and the forward label at t must
        // be built from (t, t+H] only.
        const int T = 60, H = 10;
        Series ordinal(T);
        for (int t = 0; t < T; ++t) ordinal[t] = t;
        Panel p = make_panel({{"probe", ordinal}});
        Panel lagged = p.lag_columns({"probe"}, 1);
        for (int t = 1; t < T; ++t)
            c.expect(lagged.values()(t, 0) == t - 1.0, "feature lag probe");
        c.expect(is_missing(lagged.values()(0, 0)), "feature lag warmup");

        Series fwd = forward_label(ordinal, H);
        for (int t = 0; t + H < T; ++t)
            c.expect(fwd[t] == t + H, "forward label probe");
        for (int t = T - H; t < T; ++t)
            c.expect(is_missing(fwd[t]), "forward label tail");

        // Train-only quantile: corrupting valid/test cannot move the cut.
        Series risk(200);
        for (int i = 0; i < 200; ++i) risk[i] = i;
        SplitSpec split = chrono_split(200);
        Series l1 = label_top_quantile(risk, 0.85, split);
        for (size_t i = split.train_end; i < 200; ++i) risk[i] = 1e9;
        Series l2 = label_top_quantile(risk, 0.85, split);
        for (size_t i = 0; i < split.train_end; ++i)
            c.expect(l1[i] == l2[i], "train-only quantile cut moved");
    }
    {
        // Threshold choice equals the brute-force F1 sweep.
        Rng rng(5150);
        std::vector<double> scores;
        std::vector<int> labels;
        for (int i = 0; i < 200; ++i) {
            scores.push_back(rng.uniform());
            labels.push_back(rng.uniform() < 0.3 ? 1 : 0);
        }
        auto choice = choose_threshold(scores, labels);
        double best = -1.0;
        std::vector<double> cands = scores;
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        for (double tau : cands) {
            std::vector<int> preds;
            for (double s : scores) preds.push_back(s >= tau ? 1 : 0);
            best = std::max(best, f1_score(labels, preds));
        }
        c.expect(std::abs(choice.valid_f1 - best) < 1e-12, "threshold brute-force sweep");
    }
    {
        // TreeSHAP local accuracy and exhaustive-subset equality.
        Rng rng(71);
        const int n = 200, M = 8;
        Eigen::MatrixXd X(n, M);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < M; ++j) X(i, j) = rng.normal();
            y(i) = 1.2 * X(i, 0) - 0.8 * X(i, 2) * X(i, 5) + (X(i, 7) > 0 ? 1.0 : -0.5) +
                   0.1 * rng.normal();
        }
        GbtParams params;
        params.max_depth = 3;
        params.learning_rate = 0.2;
        params.max_rounds = 10;
        params.early_stopping_rounds = 10;
        GbtModel model = gbt_train(X, y, X, y, params);

        auto shap = tree_shap(model, X.topRows(20));
        for (int r = 0; r < 20; ++r) {
            const double recon = shap.base + shap.values.row(r).sum();
            c.expect(std::abs(recon - model.margin(X.row(r))) < 1e-6,
                     "TreeSHAP local accuracy");
        }

        // Exhaustive-subset oracle on a handful of rows.
        std::vector<double> fact(M + 1, 1.0);
        for (int i = 1; i <= M; ++i) fact[i] = fact[i - 1] * i;
        std::function<double(const Tree&, int, const Eigen::RowVectorXd&,
                             const std::vector<bool>&)>
            cond = [&](const Tree& tree, int node, const Eigen::RowVectorXd& x,
                       const std::vector<bool>& in_s) -> double {
            const TreeNode& nd = tree.nodes[node];
            if (nd.feature < 0) return nd.value;
            if (in_s[nd.feature]) {
                const double v = x(nd.feature);
                const bool left = std::isnan(v) ? nd.default_left : v < nd.threshold;
                return cond(tree, left ? nd.left : nd.right, x, in_s);
            }
            const double wl = tree.nodes[nd.left].cover, wr = tree.nodes[nd.right].cover;
            return (wl * cond(tree, nd.left, x, in_s) + wr * cond(tree, nd.right, x, in_s)) /
                   (wl + wr);
        };
        for (int r = 0; r < 4; ++r) {
            const Eigen::RowVectorXd x = X.row(r);
            for (int i = 0; i < M; ++i) {
                double phi = 0.0;
                for (int t = 0; t < model.best_iteration; ++t) {
                    for (uint32_t mask = 0; mask < (1u << M); ++mask) {
                        if (mask & (1u << i)) continue;
                        std::vector<bool> in_s(M, false);
                        int sz = 0;
                        for (int j = 0; j < M; ++j)
                            if (mask & (1u << j)) {
                                in_s[j] = true;
                                ++sz;
                            }
                        const double without = cond(model.trees[t], 0, x, in_s);
                        in_s[i] = true;
                        const double with_i = cond(model.trees[t], 0, x, in_s);
                        phi += fact[sz] * fact[M - sz - 1] / fact[M] *
                               model.learning_rate * (with_i - without);
                    }
                }
                c.expect(std::abs(shap.values(r, i) - phi) < 1e-6,
                         "TreeSHAP exhaustive-subset oracle");
            }
        }

        // Identical retrain gives bit-identical predictions.
        GbtModel again = gbt_train(X, y, X, y, params);
        for (int i = 0; i < n; ++i) {
            const double a = model.predict_one(X.row(i));
            const double b = again.predict_one(X.row(i));
            c.expect(std::memcmp(&a, &b, sizeof(double)) == 0, "bit-identical retrain");
        }
    }
    {
        // Random-walk persistence baseline saturates level prediction.
        Rng rng(9);
        const int n = 4000, H = 2;
        Series level(n);
        double walk = 0.0;
        for (int i = 0; i < n; ++i) {
            walk += rng.normal();
            level[i] = walk;
        }
        Series y(n - H), persistence(n - H);
        for (int i = 0; i < n - H; ++i) {
            y[i] = level[i + H];
            persistence[i] = level[i];
        }
        auto split = chrono_split(y.size());
        std::vector<int> labels;
        for (size_t i = 0; i < y.size(); ++i) labels.push_back(rng.uniform() < 0.2 ? 1 : 0);
        Eigen::MatrixXd X(y.size(), 1);
        for (size_t i = 0; i < y.size(); ++i) X(i, 0) = persistence[i];
        auto reports = baselines(X, persistence, y, labels, split);
        c.expect(reports[0].test.regression.r2 > 0.9,
                 "random-walk persistence R2 " +
                     std::to_string(reports[0].test.regression.r2));
    }
    return c;
}

// --------------------------------------------------------------------------
// 7. pipeline reproducibility on the bundled synthetic dataset
// --------------------------------------------------------------------------
Checker criterion_pipeline(const std::string& source_dir) {
    Checker c;
    const std::string config_path = source_dir + "/configs/synth.json";
    if (!fs::exists(config_path)) {
        c.expect(false, "missing " + config_path);
        return c;
    }
    RunConfig cfg = RunConfig::from_json_file(config_path);
    for (auto& a : cfg.assets) a.csv = source_dir + "/" + a.csv;

    const auto out_root = fs::temp_directory_path() / "riskpipe_acceptance";
    fs::remove_all(out_root);

    const auto t0 = std::chrono::steady_clock::now();
    RunArtifacts first = run_pipeline(cfg, out_root.string(), (out_root / "a").string());
    const double first_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    RunArtifacts second = run_pipeline(cfg, out_root.string(), (out_root / "b").string());

    c.expect(first_s < 300.0, "full run took " + std::to_string(first_s) + "s");
    c.expect(first.manifest == second.manifest, "manifests differ between identical runs");

    for (const auto& name : documented_artifacts(cfg)) {
        c.expect(first.manifest.count(name) == 1, "missing documented artifact " + name);
    }
    c.detail += " (" + std::to_string(first.manifest.size()) + " files, " +
                std::to_string(first_s) + "s per run)";
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string source_dir = argc > 1 ? argv[1] : ".";

    struct Criterion {
        const char* name;
        std::function<Checker()> run;
    };
    const std::vector<Criterion> criteria = {
        {"1 statistical size (granger/block/ljung-box nulls)", criterion_size},
        {"2 statistical power (planted DGPs, layer-C grid)", criterion_power},
        {"3 linear-algebra oracles (VAR/BIC/IRF/FEVD/shocks)", criterion_var},
        {"4 estimator oracles (GARCH/HAR-X/NW/BH-FDR)", criterion_estimators},
        {"5 formula spot checks (parkinson/crowding/pagerank)", criterion_formulas},
        {"6 ML protocol (leakage/threshold/TreeSHAP/determinism)", criterion_ml},
        {"7 pipeline reproducibility (bundled synthetic dataset)",
         [&] { return criterion_pipeline(source_dir); }},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Checker result;
        try {
            result = criterion.run();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        std::cout << (result.ok ? "[PASS] " : "[FAIL] ") << criterion.name;
        if (!result.detail.empty()) std::cout << (result.ok ? "" : " --") << result.detail;
        std::cout << "\n";
        if (!result.ok) ++failures;
    }
    return failures;
}
