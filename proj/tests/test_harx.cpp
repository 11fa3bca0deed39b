#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "riskpipe/harx.hpp"
#include "riskpipe/rng.hpp"

using namespace riskpipe;

TEST_CASE("har_regressors trailing means") {
    const int T = 40;
    Eigen::MatrixXd v(T, 1);
    for (int t = 0; t < T; ++t) v(t, 0) = t + 1;  // 1-based row ordinal

    Eigen::MatrixXd regs = har_regressors(v, {1, 5, 22});
    // Window 5 ending at t=9 (value 10): mean(6..10) = 8.
    CHECK(regs(9, 1) == doctest::Approx(8.0));
    // Window 1 equals the series itself.
    for (int t = 0; t < T; ++t) CHECK(regs(t, 0) == doctest::Approx(t + 1.0));
    // Window 22 warmup rows are missing.
    for (int t = 0; t < 21; ++t) CHECK(is_missing(regs(t, 2)));
    CHECK(regs(21, 2) == doctest::Approx(11.5));  // mean(1..22)

    SUBCASE("constant series maps to constant regressors") {
        Eigen::MatrixXd c = Eigen::MatrixXd::Constant(T, 1, 3.25);
        Eigen::MatrixXd r = har_regressors(c, {1, 5, 22});
        for (int t = 21; t < T; ++t)
            for (int j = 0; j < 3; ++j) CHECK(r(t, j) == doctest::Approx(3.25));
    }
    SUBCASE("windows must be strictly increasing") {
        CHECK_THROWS_AS(har_regressors(v, {5, 5}), ParameterError);
        CHECK_THROWS_AS(har_regressors(v, {5, 1}), ParameterError);
    }
}

TEST_CASE("harx_fit recovers exact betas on a noiseless synthetic") {
    Rng rng(20);
    const int T = 400;
    Eigen::MatrixXd v(T, 2);
    for (int t = 0; t < T; ++t) {
        v(t, 0) = rng.normal();
        v(t, 1) = rng.normal();
    }
    Eigen::MatrixXd regs = har_regressors(v, {1, 5, 22});

    const double b0 = 0.7;
    const Eigen::VectorXd bd = (Eigen::VectorXd(2) << 1.5, -0.5).finished();
    const Eigen::VectorXd bw = (Eigen::VectorXd(2) << 0.8, 0.2).finished();
    const Eigen::VectorXd bm = (Eigen::VectorXd(2) << -1.1, 0.4).finished();

    // y_t generated from regressor windows ending at t-1 with zero noise.
    Series y(T, missing());
    for (int t = 1; t < T; ++t) {
        if (regs.row(t - 1).hasNaN()) continue;
        y[t] = b0 + (regs.block(t - 1, 0, 1, 2) * bd).value() +
               (regs.block(t - 1, 2, 1, 2) * bw).value() +
               (regs.block(t - 1, 4, 1, 2) * bm).value();
    }
    HarxFit fit = harx_fit(y, v);
    CHECK(fit.beta0 == doctest::Approx(b0).epsilon(1e-8));
    for (int k = 0; k < 2; ++k) {
        CHECK(fit.beta_d(k) == doctest::Approx(bd(k)).epsilon(1e-8));
        CHECK(fit.beta_w(k) == doctest::Approx(bw(k)).epsilon(1e-8));
        CHECK(fit.beta_m(k) == doctest::Approx(bm(k)).epsilon(1e-8));
    }
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("nw_lag 0 equals the heteroskedasticity-only sandwich") {
    Rng rng(8);
    const int T = 300;
    Eigen::MatrixXd v(T, 1);
    Series y(T);
    for (int t = 0; t < T; ++t) {
        v(t, 0) = rng.normal();
        y[t] = 0.5 + rng.normal() * (1.0 + 0.5 * std::abs(v(t, 0)));
    }
    HarxFit fit = harx_fit(y, v, 0);

    // Rebuild the joint sample and compute HC0 directly.
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
    Eigen::MatrixXd hc0 = bread * meat * bread;
    CHECK((fit.hac_cov - hc0).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("HAC se close to classical OLS se under iid homoskedastic errors") {
    Rng rng(666);
    const int T = 5000;
    Eigen::MatrixXd v(T, 1);
    Series y(T);
    for (int t = 0; t < T; ++t) v(t, 0) = rng.normal();
    Eigen::MatrixXd regs = har_regressors(v, {1, 5, 22});
    for (int t = 0; t < T; ++t) {
        y[t] = missing();
        if (t >= 1 && !regs.row(t - 1).hasNaN())
            y[t] = 1.0 + 0.5 * regs(t - 1, 0) + rng.normal();
    }
    HarxFit fit = harx_fit(y, v);

    // Classical OLS se on the same sample.
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
    const double s2 = (Y - X * beta).squaredNorm() / (n - 4);
    Eigen::MatrixXd classical =
        s2 * (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(4, 4));
    for (int k = 0; k < 4; ++k) {
        const double ratio = fit.hac_se(k) / std::sqrt(classical(k, k));
        CHECK(ratio > 0.85);
        CHECK(ratio < 1.15);
    }
}

TEST_CASE("regressors use only information dated <= t-1") {
    // With a single daily window, y_t = v_{t-1} must fit exactly; if the
    // window ended at t instead, the noise-free fit would break.
    Rng rng(19);
    const int T = 200;
    Eigen::MatrixXd v(T, 1);
    for (int t = 0; t < T; ++t) v(t, 0) = rng.normal();
    Series y(T, missing());
    for (int t = 1; t < T; ++t) y[t] = v(t - 1, 0);
    HarxFit fit = harx_fit(y, v, std::nullopt, {1});
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.beta_d(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fit.beta0 == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("slopes are invariant to target level shifts") {
    Rng rng(5);
    const int T = 300;
    Eigen::MatrixXd v(T, 1);
    Series y(T, missing());
    for (int t = 0; t < T; ++t) v(t, 0) = rng.normal();
    Eigen::MatrixXd regs = har_regressors(v, {1, 5, 22});
    for (int t = 1; t < T; ++t)
        if (!regs.row(t - 1).hasNaN()) y[t] = 0.4 * regs(t - 1, 0) + rng.normal();

    HarxFit base = harx_fit(y, v);
    Series shifted = y;
    for (auto& val : shifted)
        if (!is_missing(val)) val += 1000.0;
    HarxFit moved = harx_fit(shifted, v);
    CHECK(moved.beta0 == doctest::Approx(base.beta0 + 1000.0).epsilon(1e-8));
    for (int k = 1; k < base.coef.size(); ++k)
        CHECK(moved.coef(k) == doctest::Approx(base.coef(k)).epsilon(1e-8));
}

TEST_CASE("HAC covariance is symmetric positive semi-definite") {
    Rng rng(12);
    const int T = 400;
    Eigen::MatrixXd v(T, 2);
    Series y(T, missing());
    for (int t = 0; t < T; ++t) {
        v(t, 0) = rng.normal();
        v(t, 1) = rng.normal();
        y[t] = rng.normal();
    }
    HarxFit fit = harx_fit(y, v);
    CHECK((fit.hac_cov - fit.hac_cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.hac_cov);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
    // tstat = beta / se identity.
    for (int k = 0; k < fit.coef.size(); ++k)
        if (fit.hac_se(k) > 0)
            CHECK(fit.tstats(k) ==
                  doctest::Approx(fit.coef(k) / fit.hac_se(k)).epsilon(1e-10));
}

TEST_CASE("harx error paths") {
    Eigen::MatrixXd v(100, 1);
    v.setRandom();
    Series y(100, 1.0);
    CHECK_THROWS_AS(harx_fit(y, v), DegenerateVarianceError);  // constant target

    Eigen::MatrixXd tiny(30, 1);
    tiny.setRandom();
    CHECK_THROWS_AS(harx_fit(Series(30, 0.5), tiny), Error);  // sample too small
}
