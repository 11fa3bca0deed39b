#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "riskpipe/panel.hpp"

namespace riskpipe {

struct OrderBic {
    int pmax;
};
struct OrderFixed {
    int p;
};
using VarOrder = std::variant<OrderBic, OrderFixed>;

// y_t = intercept + sum_i A_i y_{t-i} + e_t
struct VarModel {
    int order = 1;
    Eigen::VectorXd intercept;
    std::vector<Eigen::MatrixXd> coeffs;  // A_1..A_p
    Eigen::MatrixXd resid_cov;            // unbiased, T_eff - (n p + 1) denominator
    Eigen::MatrixXd residuals;            // T_eff x n
    std::vector<Eigen::Index> sample_rows;  // input row of each residual row
    std::vector<std::string> names;

    int n_vars() const { return static_cast<int>(intercept.size()); }
};

// Per-equation OLS with intercept. BIC order search uses a common sample
// aligned to pmax and the criterion ln|Sigma(p)| + p n^2 ln(T)/T; the chosen
// order is refit on its maximal sample. Rows with any missing value in the
// lag embedding are dropped listwise.
VarModel var_fit(const Eigen::MatrixXd& y, const VarOrder& order,
                 const std::vector<std::string>& names = {});

// Orthogonalized impulse responses: IRF_h = Phi_h * P with P the lower
// Cholesky factor of the residual covariance. Returns H*+1 matrices,
// IRF[h](i, j) = response of variable i to shock j after h steps.
std::vector<Eigen::MatrixXd> orth_irf(const VarModel& m, int horizons);

// Forecast error variance shares. Element h holds the decomposition over
// steps s = 0..h; every row sums to 1.
std::vector<Eigen::MatrixXd> fevd(const VarModel& m, int horizons);

struct LjungBoxResult {
    double Q = 0.0;
    double p = 1.0;
};

// Q = T (T+2) sum_{k<=lags} rho_k^2 / (T-k), referenced to chi^2(lags).
LjungBoxResult ljung_box(const Series& resid, int lags = 10);

// u_t = P^{-1} e_t; sample covariance is approximately the identity.
Eigen::MatrixXd structural_shocks(const VarModel& m);

// Spectral radius of the companion matrix (< 1 means stable dynamics).
double companion_spectral_radius(const VarModel& m);

}  // namespace riskpipe
