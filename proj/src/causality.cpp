#include "riskpipe/causality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskpipe/parallel.hpp"
#include "riskpipe/stats.hpp"

namespace riskpipe {

GrangerPair granger_pair(const Series& x, const Series& y, int lag) {
    if (lag < 1) throw ParameterError("granger_pair: lag must be >= 1");
    if (x.size() != y.size()) throw ShapeError("granger_pair: series lengths differ");

    // Rows where y_t, y lags and x lags are all observed.
    std::vector<size_t> rows;
    for (size_t t = lag; t < y.size(); ++t) {
        bool ok = !is_missing(y[t]);
        for (int i = 1; ok && i <= lag; ++i)
            ok = !is_missing(y[t - i]) && !is_missing(x[t - i]);
        if (ok) rows.push_back(t);
    }
    const int T_eff = static_cast<int>(rows.size());
    if (T_eff < 10 * lag + 10)
        throw SampleSizeError("granger_pair: need >= " + std::to_string(10 * lag + 10) +
                              " embedded rows, have " + std::to_string(T_eff));

    Eigen::MatrixXd Xr(T_eff, 1 + lag), Xu(T_eff, 1 + 2 * lag);
    Eigen::VectorXd Y(T_eff);
    for (int r = 0; r < T_eff; ++r) {
        const size_t t = rows[r];
        Xr(r, 0) = Xu(r, 0) = 1.0;
        for (int i = 1; i <= lag; ++i) {
            Xr(r, i) = Xu(r, i) = y[t - i];
            Xu(r, lag + i) = x[t - i];
        }
        Y(r) = y[t];
    }

    const auto restricted = stats::ols(Xr, Y);
    const auto unrestricted = stats::ols(Xu, Y);

    GrangerPair out;
    out.df1 = lag;
    out.df2 = T_eff - 2 * lag - 1;
    if (out.df2 <= 0) throw SampleSizeError("granger_pair: nonpositive residual dof");
    double num = (restricted.rss - unrestricted.rss) / out.df1;
    double den = unrestricted.rss / out.df2;
    if (!(den > 0.0)) den = 1e-300;
    out.F = std::max(num / den, 0.0);
    out.p = stats::fisher_f_sf(out.F, out.df1, out.df2);
    return out;
}

GrangerResult block_granger(const Panel& panel, const std::vector<std::string>& cause_block,
                            const std::vector<std::string>& effect_block,
                            const VarOrder& order) {
    if (cause_block.empty() || effect_block.empty())
        throw ParameterError("block_granger: empty block");
    for (const auto& c : cause_block)
        for (const auto& e : effect_block)
            if (c == e) throw ParameterError("block_granger: blocks overlap on '" + c + "'");

    const int n_cause = static_cast<int>(cause_block.size());
    const int n_eff = static_cast<int>(effect_block.size());
    const int n = n_cause + n_eff;

    // Variable order: effect block first, cause block last. The ordering only
    // labels columns; the test statistic is invariant to it.
    std::vector<std::string> all = effect_block;
    all.insert(all.end(), cause_block.begin(), cause_block.end());
    Panel sub = panel.select(all);
    const Eigen::MatrixXd& y = sub.values();

    int p = 0;
    if (std::holds_alternative<OrderFixed>(order)) {
        p = std::get<OrderFixed>(order).p;
        if (p < 1) throw ParameterError("block_granger: lag must be >= 1");
    } else {
        p = var_fit(y, order).order;  // BIC choice on the joint system
    }

    // Listwise over the lag embedding.
    std::vector<Eigen::Index> rows;
    for (Eigen::Index t = p; t < y.rows(); ++t) {
        bool ok = true;
        for (int i = 0; i <= p && ok; ++i)
            if (y.row(t - i).hasNaN()) ok = false;
        if (ok) rows.push_back(t);
    }
    const int T_eff = static_cast<int>(rows.size());
    const int k_unres = 1 + n * p;
    if (T_eff <= k_unres + 1)
        throw SampleSizeError("block_granger: sample too small for order " + std::to_string(p));

    Eigen::MatrixXd Xu(T_eff, k_unres), Xr(T_eff, 1 + n_eff * p);
    Eigen::MatrixXd Y(T_eff, n_eff);
    for (int r = 0; r < T_eff; ++r) {
        const Eigen::Index t = rows[r];
        Xu(r, 0) = Xr(r, 0) = 1.0;
        for (int i = 1; i <= p; ++i) {
            for (int j = 0; j < n_eff; ++j) {
                Xu(r, 1 + (i - 1) * n + j) = y(t - i, j);
                Xr(r, 1 + (i - 1) * n_eff + j) = y(t - i, j);
            }
            for (int j = 0; j < n_cause; ++j)
                Xu(r, 1 + (i - 1) * n + n_eff + j) = y(t - i, n_eff + j);
        }
        for (int j = 0; j < n_eff; ++j) Y(r, j) = y(t, j);
    }

    double rss_u = 0.0, rss_r = 0.0;
    for (int j = 0; j < n_eff; ++j) {
        rss_u += stats::ols(Xu, Y.col(j)).rss;
        rss_r += stats::ols(Xr, Y.col(j)).rss;
    }

    GrangerResult res;
    res.cause_block = cause_block;
    res.effect_block = effect_block;
    res.lag = p;
    res.order_rule = std::holds_alternative<OrderFixed>(order) ? "fixed" : "bic";
    const int df1 = n_cause * p * n_eff;
    const int df2 = n_eff * (T_eff - k_unres);
    if (df2 <= 0) throw SampleSizeError("block_granger: nonpositive residual dof");
    double num = (rss_r - rss_u) / df1;
    double den = rss_u / df2;
    if (!(den > 0.0)) den = 1e-300;
    res.F = std::max(num / den, 0.0);
    res.p = stats::fisher_f_sf(res.F, df1, df2);
    return res;
}

std::vector<double> bh_fdr(const std::vector<double>& pvals) {
    const size_t m = pvals.size();
    for (double p : pvals)
        if (!(p >= 0.0 && p <= 1.0))
            throw DomainError("bh_fdr: p-value outside [0,1]");

    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return pvals[a] < pvals[b]; });

    std::vector<double> q(m, 0.0);
    double running = 1.0;
    for (size_t i = m; i-- > 0;) {
        const double adj = pvals[order[i]] * static_cast<double>(m) /
                           static_cast<double>(i + 1);
        running = std::min(running, adj);
        q[order[i]] = std::min(running, 1.0);
    }
    return q;
}

GrangerNetwork build_granger_network(const Panel& std_returns, int max_lag, double alpha) {
    const auto names = std_returns.column_names();
    const int n = static_cast<int>(names.size());
    if (n < 1) throw ParameterError("build_granger_network: empty panel");

    GrangerNetwork net;
    net.nodes = names;
    net.adjacency = Eigen::MatrixXd::Zero(n, n);
    net.min_p = Eigen::MatrixXd::Constant(n, n, missing());

    std::vector<Series> cols(n);
    for (int i = 0; i < n; ++i) cols[i] = std_returns.col(i);

    // The pair grid is embarrassingly parallel; every task writes only its
    // own (i, j) cell, so the result is identical for any worker count.
    std::vector<std::vector<std::string>> skipped(static_cast<size_t>(n) * n);
    parallel_for(static_cast<size_t>(n) * n, [&](size_t cell) {
        const int i = static_cast<int>(cell) / n;
        const int j = static_cast<int>(cell) % n;
        if (i == j) return;
        double best = missing();
        for (int lag = 1; lag <= max_lag; ++lag) {
            try {
                const double p = granger_pair(cols[i], cols[j], lag).p;
                if (is_missing(best) || p < best) best = p;
            } catch (const Error& e) {
                skipped[cell].push_back(names[i] + "->" + names[j] + " lag " +
                                        std::to_string(lag) + ": " + e.what());
            }
        }
        if (!is_missing(best)) {
            net.min_p(i, j) = best;
            if (best < alpha) net.adjacency(i, j) = 1.0;
        }
    });
    for (auto& cell_skips : skipped)
        for (auto& msg : cell_skips) net.skipped.push_back(std::move(msg));
    return net;
}

Eigen::VectorXd pagerank(const Eigen::MatrixXd& adjacency, const PageRankParams& params,
                         bool transpose) {
    if (adjacency.rows() != adjacency.cols())
        throw ShapeError("pagerank: adjacency must be square");
    const int n = static_cast<int>(adjacency.rows());
    if (n < 1) throw ParameterError("pagerank: empty graph");
    if (!(params.damping > 0.0 && params.damping < 1.0))
        throw ParameterError("pagerank: damping must be in (0,1)");

    Eigen::MatrixXd A =
        transpose ? Eigen::MatrixXd(adjacency.transpose()) : adjacency;
    Eigen::VectorXd outdeg = A.rowwise().sum();

    Eigen::VectorXd s = Eigen::VectorXd::Constant(n, 1.0 / n);
    const double alpha = params.damping;
    for (int iter = 0; iter < params.max_iter; ++iter) {
        Eigen::VectorXd next = Eigen::VectorXd::Constant(n, (1.0 - alpha) / n);
        double dangling = 0.0;
        for (int i = 0; i < n; ++i) {
            if (outdeg(i) > 0.0) {
                const double share = alpha * s(i) / outdeg(i);
                for (int j = 0; j < n; ++j)
                    if (A(i, j) != 0.0) next(j) += share;
            } else {
                dangling += s(i);
            }
        }
        next.array() += alpha * dangling / n;
        const double diff = (next - s).cwiseAbs().sum();
        s = next;
        if (diff < params.tol) break;
    }
    return s / s.sum();
}

std::vector<std::string> select_core(const std::vector<std::string>& nodes,
                                     const Eigen::VectorXd& scores, int N,
                                     const std::set<std::string>& whitelist) {
    const int n = static_cast<int>(nodes.size());
    if (scores.size() != n) throw ShapeError("select_core: scores do not match nodes");
    if (N > n) throw ParameterError("select_core: N exceeds node count");
    if (N < static_cast<int>(whitelist.size()))
        throw ParameterError("select_core: N smaller than whitelist");
    for (const auto& w : whitelist)
        if (std::find(nodes.begin(), nodes.end(), w) == nodes.end())
            throw ParameterError("select_core: whitelist asset '" + w + "' not in universe");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores(a) != scores(b)) return scores(a) > scores(b);
        return nodes[a] < nodes[b];
    });

    std::vector<int> picked;
    for (int i : order)
        if (whitelist.count(nodes[i])) picked.push_back(i);
    for (int i : order) {
        if (static_cast<int>(picked.size()) >= N) break;
        if (!whitelist.count(nodes[i])) picked.push_back(i);
    }
    std::sort(picked.begin(), picked.end(), [&](int a, int b) {
        if (scores(a) != scores(b)) return scores(a) > scores(b);
        return nodes[a] < nodes[b];
    });

    std::vector<std::string> out;
    out.reserve(picked.size());
    for (int i : picked) out.push_back(nodes[i]);
    return out;
}

namespace {

std::vector<std::string> pc_columns(const Panel& p, const std::string& prefix) {
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

void run_cell(std::vector<GrangerResult>& results, const Panel& panel,
              const std::vector<std::string>& cause, const std::vector<std::string>& effect,
              const VarOrder& order, GrangerLayer layer) {
    GrangerResult res;
    try {
        res = block_granger(panel, cause, effect, order);
    } catch (const Error& e) {
        res.cause_block = cause;
        res.effect_block = effect;
        res.order_rule = std::holds_alternative<OrderFixed>(order) ? "fixed" : "bic";
        res.lag = std::holds_alternative<OrderFixed>(order) ? std::get<OrderFixed>(order).p : 0;
        res.F = missing();
        res.p = missing();
        res.error = e.what();
    }
    res.layer = layer;
    results.push_back(std::move(res));
}

void fdr_within_layer(std::vector<GrangerResult>& results, GrangerLayer layer) {
    std::vector<size_t> idx;
    std::vector<double> ps;
    for (size_t i = 0; i < results.size(); ++i)
        if (results[i].layer == layer && results[i].error.empty()) {
            idx.push_back(i);
            ps.push_back(results[i].p);
        }
    if (ps.empty()) return;
    const auto qs = bh_fdr(ps);
    for (size_t k = 0; k < idx.size(); ++k) results[idx[k]].q = qs[k];
}

}  // namespace

std::vector<GrangerResult> run_layers(const Panel& features, const Panel& factors,
                                      const LayerConfig& config) {
    const Panel joint = Panel::align({features, factors}, AlignPolicy::inner);
    std::vector<GrangerResult> results;

    // Layer A: per-core proxy <-> own return, both directions.
    const VarOrder bic = OrderBic{config.bic_pmax};
    for (const auto& core : config.cores) {
        const std::string ret_col = core + "_ret";
        for (const auto& proxy : config.layer_a_proxies) {
            const std::string proxy_col = core + "_" + proxy;
            run_cell(results, joint, {proxy_col}, {ret_col}, bic, GrangerLayer::A);
        }
        for (const auto& proxy : config.layer_a_proxies) {
            const std::string proxy_col = core + "_" + proxy;
            run_cell(results, joint, {ret_col}, {proxy_col}, bic, GrangerLayer::A);
        }
    }

    // Layer B: LV-family PC block -> each return PC, then returns block ->
    // each LV-family PC.
    const auto ret_pcs = pc_columns(factors, config.returns_pc_prefix);
    for (const auto& family : config.layer_b_families) {
        const auto fam_pcs = pc_columns(factors, family + "_PC");
        if (fam_pcs.empty()) continue;
        for (const auto& rpc : ret_pcs)
            run_cell(results, joint, fam_pcs, {rpc}, bic, GrangerLayer::B);
    }
    if (!ret_pcs.empty()) {
        for (const auto& family : config.layer_b_families) {
            const auto fam_pcs = pc_columns(factors, family + "_PC");
            for (const auto& fpc : fam_pcs)
                run_cell(results, joint, ret_pcs, {fpc}, bic, GrangerLayer::B);
        }
    }

    // Layer C: vol-PC block -> crowding target, BIC order plus fixed lags.
    const auto vol_pcs = pc_columns(factors, config.vol_pc_prefix);
    if (!vol_pcs.empty() && factors.has_column(config.crowding_column)) {
        run_cell(results, joint, vol_pcs, {config.crowding_column}, bic, GrangerLayer::C);
        for (int lag : config.layer_c_fixed_lags)
            run_cell(results, joint, vol_pcs, {config.crowding_column}, OrderFixed{lag},
                     GrangerLayer::C);
    }

    fdr_within_layer(results, GrangerLayer::A);
    fdr_within_layer(results, GrangerLayer::B);
    fdr_within_layer(results, GrangerLayer::C);
    return results;
}

}  // namespace riskpipe
