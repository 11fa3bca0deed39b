#pragma once

#include <Eigen/Dense>
#include <vector>

#include "riskpipe/errors.hpp"

namespace riskpipe {

enum class GbtObjective { squared_error, logistic };

struct GbtParams {
    GbtObjective objective = GbtObjective::squared_error;
    int max_depth = 3;
    double learning_rate = 0.05;
    int max_rounds = 2000;
    int early_stopping_rounds = 50;
    double min_child_weight = 1.0;
    double lambda = 1.0;  // L2 leaf regularization
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    bool default_left = true;  // where missing values go
    double value = 0.0;        // leaf weight (pre learning rate)
    double cover = 0.0;        // training hessian mass through the node
};

struct Tree {
    std::vector<TreeNode> nodes;  // node 0 is the root
    double eval(const Eigen::RowVectorXd& x) const;
};

// prediction = base_score + lr * sum_{m < best_iteration} tree_m(x),
// passed through the sigmoid for the logistic objective.
struct GbtModel {
    GbtObjective objective = GbtObjective::squared_error;
    std::vector<Tree> trees;
    double learning_rate = 0.05;
    int best_iteration = 0;  // number of trees actually used
    double base_score = 0.0;
    std::vector<double> valid_loss_history;  // per boosting round

    double margin(const Eigen::RowVectorXd& x) const;
    double predict_one(const Eigen::RowVectorXd& x) const;  // scalar path
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

// Stagewise boosting on first/second-order gradients with exact greedy
// depth-limited splits. Training is deterministic: no subsampling, fixed
// feature order, strict improvement required for split replacement.
// Stops when validation loss has not improved for early_stopping_rounds.
GbtModel gbt_train(const Eigen::MatrixXd& X_train, const Eigen::VectorXd& y_train,
                   const Eigen::MatrixXd& X_valid, const Eigen::VectorXd& y_valid,
                   const GbtParams& params);

struct ShapValues {
    Eigen::MatrixXd values;  // rows x features, margin space
    double base = 0.0;       // expected margin over training cover
};

// Exact TreeSHAP (path-dependent conditional expectations weighted by
// training cover). base + sum of a row's attributions equals the raw margin.
ShapValues tree_shap(const GbtModel& model, const Eigen::MatrixXd& X);

}  // namespace riskpipe
