#include "riskpipe/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace riskpipe {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct GradHess {
    double g = 0.0;
    double h = 0.0;
};

double leaf_weight(double g, double h, double lambda) { return -g / (h + lambda); }

double split_score(double g, double h, double lambda) { return g * g / (h + lambda); }

struct Builder {
    const Eigen::MatrixXd& X;
    const GbtParams& params;
    const std::vector<std::vector<int>>& sorted_rows;  // per feature, by value
    std::vector<GradHess> gh;
    std::vector<int> node_of;

    struct Candidate {
        double gain = 0.0;
        int feature = -1;
        double threshold = 0.0;
        bool default_left = true;
    };

    Candidate best_split(int node) const {
        const int n_features = static_cast<int>(X.cols());
        double g_all = 0.0, h_all = 0.0;
        for (int r = 0; r < static_cast<int>(node_of.size()); ++r)
            if (node_of[r] == node) {
                g_all += gh[r].g;
                h_all += gh[r].h;
            }
        const double parent_score = split_score(g_all, h_all, params.lambda);

        Candidate best;
        for (int f = 0; f < n_features; ++f) {
            // Missing mass for this feature within the node.
            double g_miss = 0.0, h_miss = 0.0;
            for (int r = 0; r < static_cast<int>(node_of.size()); ++r)
                if (node_of[r] == node && std::isnan(X(r, f))) {
                    g_miss += gh[r].g;
                    h_miss += gh[r].h;
                }
            const double g_nm = g_all - g_miss, h_nm = h_all - h_miss;

            double g_left = 0.0, h_left = 0.0;
            double prev_value = 0.0;
            bool have_prev = false;
            for (int r : sorted_rows[f]) {
                if (node_of[r] != node) continue;
                const double v = X(r, f);
                if (have_prev && v > prev_value) {
                    // Candidate cut between prev_value and v.
                    double gl = g_left, hl = h_left;
                    double gr = g_nm - g_left, hr = h_nm - h_left;
                    const bool to_left = hl >= hr;
                    if (to_left) {
                        gl += g_miss;
                        hl += h_miss;
                    } else {
                        gr += g_miss;
                        hr += h_miss;
                    }
                    if (hl >= params.min_child_weight && hr >= params.min_child_weight) {
                        const double gain = 0.5 * (split_score(gl, hl, params.lambda) +
                                                   split_score(gr, hr, params.lambda) -
                                                   parent_score);
                        if (gain > best.gain + 1e-12) {
                            best.gain = gain;
                            best.feature = f;
                            best.threshold = 0.5 * (prev_value + v);
                            best.default_left = to_left;
                        }
                    }
                }
                g_left += gh[r].g;
                h_left += gh[r].h;
                prev_value = v;
                have_prev = true;
            }
        }
        return best;
    }

    Tree build() {
        Tree tree;
        std::fill(node_of.begin(), node_of.end(), 0);

        double g0 = 0.0, h0 = 0.0;
        for (const auto& e : gh) {
            g0 += e.g;
            h0 += e.h;
        }
        TreeNode root;
        root.value = leaf_weight(g0, h0, params.lambda);
        root.cover = h0;
        tree.nodes.push_back(root);

        std::vector<std::pair<int, int>> frontier = {{0, 0}};  // node, depth
        while (!frontier.empty()) {
            std::vector<std::pair<int, int>> next;
            for (auto [node, depth] : frontier) {
                if (depth >= params.max_depth) continue;
                Candidate cand = best_split(node);
                if (cand.feature < 0) continue;

                const int left = static_cast<int>(tree.nodes.size());
                const int right = left + 1;
                double gl = 0.0, hl = 0.0, gr = 0.0, hr = 0.0;
                for (int r = 0; r < static_cast<int>(node_of.size()); ++r) {
                    if (node_of[r] != node) continue;
                    const double v = X(r, cand.feature);
                    const bool goes_left =
                        std::isnan(v) ? cand.default_left : v < cand.threshold;
                    node_of[r] = goes_left ? left : right;
                    if (goes_left) {
                        gl += gh[r].g;
                        hl += gh[r].h;
                    } else {
                        gr += gh[r].g;
                        hr += gh[r].h;
                    }
                }
                TreeNode ln, rn;
                ln.value = leaf_weight(gl, hl, params.lambda);
                ln.cover = hl;
                rn.value = leaf_weight(gr, hr, params.lambda);
                rn.cover = hr;
                tree.nodes.push_back(ln);
                tree.nodes.push_back(rn);

                tree.nodes[node].feature = cand.feature;
                tree.nodes[node].threshold = cand.threshold;
                tree.nodes[node].left = left;
                tree.nodes[node].right = right;
                tree.nodes[node].default_left = cand.default_left;
                next.push_back({left, depth + 1});
                next.push_back({right, depth + 1});
            }
            frontier = std::move(next);
        }
        return tree;
    }
};

double loss_of(GbtObjective obj, const Eigen::VectorXd& y, const Eigen::VectorXd& margin) {
    const Eigen::Index n = y.size();
    double total = 0.0;
    if (obj == GbtObjective::squared_error) {
        total = (y - margin).squaredNorm() / static_cast<double>(n);
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = std::clamp(sigmoid(margin(i)), 1e-12, 1.0 - 1e-12);
            total -= y(i) * std::log(p) + (1.0 - y(i)) * std::log(1.0 - p);
        }
        total /= static_cast<double>(n);
    }
    return total;
}

}  // namespace

double Tree::eval(const Eigen::RowVectorXd& x) const {
    int node = 0;
    while (nodes[node].feature >= 0) {
        const double v = x(nodes[node].feature);
        const bool left = std::isnan(v) ? nodes[node].default_left : v < nodes[node].threshold;
        node = left ? nodes[node].left : nodes[node].right;
    }
    return nodes[node].value;
}

double GbtModel::margin(const Eigen::RowVectorXd& x) const {
    double m = base_score;
    for (int t = 0; t < best_iteration; ++t) m += learning_rate * trees[t].eval(x);
    return m;
}

double GbtModel::predict_one(const Eigen::RowVectorXd& x) const {
    const double m = margin(x);
    return objective == GbtObjective::logistic ? sigmoid(m) : m;
}

Eigen::VectorXd GbtModel::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out(i) = predict_one(X.row(i));
    return out;
}

GbtModel gbt_train(const Eigen::MatrixXd& X_train, const Eigen::VectorXd& y_train,
                   const Eigen::MatrixXd& X_valid, const Eigen::VectorXd& y_valid,
                   const GbtParams& params) {
    if (X_train.rows() != y_train.size()) throw ShapeError("gbt_train: X/y row mismatch");
    if (X_valid.rows() != y_valid.size()) throw ShapeError("gbt_train: valid X/y mismatch");
    if (X_train.cols() < 1) throw ParameterError("gbt_train: no features");
    if (X_valid.rows() == 0) throw ProtocolError("gbt_train: empty validation split");
    if (X_train.cols() != X_valid.cols()) throw ShapeError("gbt_train: feature count mismatch");
    for (Eigen::Index i = 0; i < y_train.size(); ++i)
        if (!std::isfinite(y_train(i))) throw DomainError("gbt_train: non-finite target");
    for (Eigen::Index i = 0; i < y_valid.size(); ++i)
        if (!std::isfinite(y_valid(i))) throw DomainError("gbt_train: non-finite valid target");

    const int n = static_cast<int>(X_train.rows());
    GbtModel model;
    model.objective = params.objective;
    model.learning_rate = params.learning_rate;

    if (params.objective == GbtObjective::squared_error) {
        model.base_score = y_train.mean();
    } else {
        const double p = std::clamp(y_train.mean(), 1e-6, 1.0 - 1e-6);
        model.base_score = std::log(p / (1.0 - p));
    }

    // Presort rows per feature; missing values are skipped during scans.
    std::vector<std::vector<int>> sorted_rows(X_train.cols());
    for (Eigen::Index f = 0; f < X_train.cols(); ++f) {
        auto& rows = sorted_rows[f];
        for (int r = 0; r < n; ++r)
            if (!std::isnan(X_train(r, f))) rows.push_back(r);
        std::stable_sort(rows.begin(), rows.end(),
                         [&](int a, int b) { return X_train(a, f) < X_train(b, f); });
    }

    Builder builder{X_train, params, sorted_rows, std::vector<GradHess>(n),
                    std::vector<int>(n, 0)};

    Eigen::VectorXd margin_train = Eigen::VectorXd::Constant(n, model.base_score);
    Eigen::VectorXd margin_valid =
        Eigen::VectorXd::Constant(X_valid.rows(), model.base_score);

    double best_loss = std::numeric_limits<double>::infinity();
    int best_round = -1;
    for (int round = 0; round < params.max_rounds; ++round) {
        for (int r = 0; r < n; ++r) {
            if (params.objective == GbtObjective::squared_error) {
                builder.gh[r] = {margin_train(r) - y_train(r), 1.0};
            } else {
                const double p = sigmoid(margin_train(r));
                builder.gh[r] = {p - y_train(r), std::max(p * (1.0 - p), 1e-16)};
            }
        }
        Tree tree = builder.build();
        for (int r = 0; r < n; ++r)
            margin_train(r) += params.learning_rate * tree.eval(X_train.row(r));
        for (Eigen::Index r = 0; r < X_valid.rows(); ++r)
            margin_valid(r) += params.learning_rate * tree.eval(X_valid.row(r));
        model.trees.push_back(std::move(tree));

        const double vloss = loss_of(params.objective, y_valid, margin_valid);
        model.valid_loss_history.push_back(vloss);
        if (vloss < best_loss - 1e-12) {
            best_loss = vloss;
            best_round = round;
        }
        if (round - best_round >= params.early_stopping_rounds) break;
    }
    model.best_iteration = best_round + 1;
    model.trees.resize(model.best_iteration);
    return model;
}

namespace {

// Lundberg & Lee exact TreeSHAP on one tree.
struct PathElement {
    int feature = -1;
    double zero_fraction = 0.0;
    double one_fraction = 0.0;
    double pweight = 0.0;
};

void extend_path(std::vector<PathElement>& path, int depth, double zero_fraction,
                 double one_fraction, int feature) {
    path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
    for (int i = depth - 1; i >= 0; --i) {
        path[i + 1].pweight +=
            one_fraction * path[i].pweight * (i + 1.0) / (depth + 1.0);
        path[i].pweight = zero_fraction * path[i].pweight * (depth - i) / (depth + 1.0);
    }
}

void unwind_path(std::vector<PathElement>& path, int depth, int index) {
    const double one = path[index].one_fraction;
    const double zero = path[index].zero_fraction;
    double next_one = path[depth].pweight;
    for (int j = depth - 1; j >= 0; --j) {
        if (one != 0.0) {
            const double tmp = path[j].pweight;
            path[j].pweight = next_one * (depth + 1.0) / ((j + 1.0) * one);
            next_one = tmp - path[j].pweight * zero * (depth - j) / (depth + 1.0);
        } else {
            path[j].pweight = path[j].pweight * (depth + 1.0) / (zero * (depth - j));
        }
    }
    for (int j = index; j < depth; ++j) {
        path[j].feature = path[j + 1].feature;
        path[j].zero_fraction = path[j + 1].zero_fraction;
        path[j].one_fraction = path[j + 1].one_fraction;
    }
}

double unwound_sum(const std::vector<PathElement>& path, int depth, int index) {
    const double one = path[index].one_fraction;
    const double zero = path[index].zero_fraction;
    double next_one = path[depth].pweight;
    double total = 0.0;
    for (int j = depth - 1; j >= 0; --j) {
        if (one != 0.0) {
            const double tmp = next_one * (depth + 1.0) / ((j + 1.0) * one);
            total += tmp;
            next_one = path[j].pweight - tmp * zero * (depth - j) / (depth + 1.0);
        } else {
            total += path[j].pweight / (zero * (depth - j) / (depth + 1.0));
        }
    }
    return total;
}

void shap_recurse(const Tree& tree, const Eigen::RowVectorXd& x, Eigen::VectorXd& phi,
                  int node, std::vector<PathElement> path, int depth,
                  double parent_zero_fraction, double parent_one_fraction,
                  int parent_feature) {
    path.resize(depth + 1);
    extend_path(path, depth, parent_zero_fraction, parent_one_fraction, parent_feature);
    const TreeNode& nd = tree.nodes[node];

    if (nd.feature < 0) {
        for (int i = 1; i <= depth; ++i) {
            const double w = unwound_sum(path, depth, i);
            phi(path[i].feature) +=
                w * (path[i].one_fraction - path[i].zero_fraction) * nd.value;
        }
        return;
    }

    const double v = x(nd.feature);
    const bool goes_left = std::isnan(v) ? nd.default_left : v < nd.threshold;
    const int hot = goes_left ? nd.left : nd.right;
    const int cold = goes_left ? nd.right : nd.left;
    const double hot_frac = tree.nodes[hot].cover / nd.cover;
    const double cold_frac = tree.nodes[cold].cover / nd.cover;

    double incoming_zero = 1.0, incoming_one = 1.0;
    int k = 0;
    for (; k <= depth; ++k)
        if (path[k].feature == nd.feature) break;
    if (k <= depth) {
        incoming_zero = path[k].zero_fraction;
        incoming_one = path[k].one_fraction;
        unwind_path(path, depth, k);
        depth -= 1;
    }

    shap_recurse(tree, x, phi, hot, path, depth + 1, incoming_zero * hot_frac, incoming_one,
                 nd.feature);
    shap_recurse(tree, x, phi, cold, path, depth + 1, incoming_zero * cold_frac, 0.0,
                 nd.feature);
}

double tree_expectation(const Tree& tree, int node) {
    const TreeNode& nd = tree.nodes[node];
    if (nd.feature < 0) return nd.value;
    const double wl = tree.nodes[nd.left].cover;
    const double wr = tree.nodes[nd.right].cover;
    return (wl * tree_expectation(tree, nd.left) + wr * tree_expectation(tree, nd.right)) /
           (wl + wr);
}

}  // namespace

ShapValues tree_shap(const GbtModel& model, const Eigen::MatrixXd& X) {
    ShapValues out;
    out.values = Eigen::MatrixXd::Zero(X.rows(), X.cols());
    out.base = model.base_score;
    for (int t = 0; t < model.best_iteration; ++t)
        out.base += model.learning_rate * tree_expectation(model.trees[t], 0);

    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(X.cols());
        const Eigen::RowVectorXd row = X.row(r);
        for (int t = 0; t < model.best_iteration; ++t) {
            const Tree& tree = model.trees[t];
            if (tree.nodes[0].feature < 0) continue;  // single leaf adds nothing
            Eigen::VectorXd tree_phi = Eigen::VectorXd::Zero(X.cols());
            shap_recurse(tree, row, tree_phi, 0, {}, 0, 1.0, 1.0, -1);
            phi += model.learning_rate * tree_phi;
        }
        out.values.row(r) = phi.transpose();
    }
    return out;
}

}  // namespace riskpipe
