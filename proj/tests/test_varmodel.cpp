#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "riskpipe/rng.hpp"
#include "riskpipe/varmodel.hpp"

using namespace riskpipe;

namespace {

// Forward-simulate a VAR(1) with lower-triangular shock loading chol_L.
Eigen::MatrixXd simulate_var1(const Eigen::MatrixXd& A, const Eigen::MatrixXd& chol_L, int T,
                              uint64_t seed) {
    Rng rng(seed);
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXd y(T, n);
    Eigen::VectorXd state = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < T; ++t) {
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) z(i) = rng.normal();
        state = A * state + chol_L * z;
        y.row(t) = state.transpose();
    }
    return y;
}

}  // namespace

TEST_CASE("var_fit recovers a known VAR(1)") {
    Eigen::MatrixXd A(2, 2);
    A << 0.5, 0.0, 0.3, 0.2;
    Eigen::MatrixXd y = simulate_var1(A, Eigen::MatrixXd::Identity(2, 2), 5000, 101);
    VarModel m = var_fit(y, OrderFixed{1});
    CHECK((m.coeffs[0] - A).cwiseAbs().maxCoeff() < 0.05);
    CHECK(m.intercept.cwiseAbs().maxCoeff() < 0.05);
    CHECK((m.resid_cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("white noise fits to near-zero coefficients") {
    Eigen::MatrixXd y =
        simulate_var1(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2), 5000, 55);
    VarModel m = var_fit(y, OrderFixed{1});
    CHECK(m.coeffs[0].cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("BIC selects the true order most of the time") {
    Eigen::MatrixXd A(2, 2);
    A << 0.5, 0.0, 0.3, 0.2;
    int correct = 0;
    const int n_seeds = 100;
    for (int s = 0; s < n_seeds; ++s) {
        Eigen::MatrixXd y =
            simulate_var1(A, Eigen::MatrixXd::Identity(2, 2), 5000, 1000 + s);
        VarModel m = var_fit(y, OrderBic{6});
        if (m.order == 1) ++correct;
    }
    CHECK(correct >= 90);
}

TEST_CASE("var_fit residuals are orthogonal to the regressors") {
    Eigen::MatrixXd A(2, 2);
    A << 0.4, 0.1, -0.2, 0.3;
    Eigen::MatrixXd y = simulate_var1(A, Eigen::MatrixXd::Identity(2, 2), 1000, 9);
    VarModel m = var_fit(y, OrderFixed{2});
    // Rebuild the design and check max |X'e| (normalized).
    const int T = static_cast<int>(m.residuals.rows());
    Eigen::MatrixXd X(T, 5);
    for (int r = 0; r < T; ++r) {
        const Eigen::Index t = m.sample_rows[r];
        X(r, 0) = 1.0;
        X.block(r, 1, 1, 2) = y.row(t - 1);
        X.block(r, 3, 1, 2) = y.row(t - 2);
    }
    const double max_dot =
        (X.transpose() * m.residuals).cwiseAbs().maxCoeff() / static_cast<double>(T);
    CHECK(max_dot < 1e-8);
}

TEST_CASE("orth_irf definition and recursion oracle") {
    Eigen::MatrixXd A(2, 2);
    A << 0.5, 0.1, 0.2, 0.3;
    Eigen::MatrixXd L(2, 2);
    L << 1.0, 0.0, 0.5, 0.8;
    Eigen::MatrixXd y = simulate_var1(A, L, 3000, 31);
    VarModel m = var_fit(y, OrderFixed{1});

    const int H = 12;
    auto irf = orth_irf(m, H);
    REQUIRE(irf.size() == H + 1);

    // IRF_0 is exactly the lower Cholesky factor of the residual covariance.
    Eigen::LLT<Eigen::MatrixXd> llt(m.resid_cov);
    CHECK((irf[0] - Eigen::MatrixXd(llt.matrixL())).cwiseAbs().maxCoeff() < 1e-12);

    // Independent recursion Phi_h = sum_i A_i Phi_{h-i}.
    Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(2, 2);
    for (int h = 1; h <= H; ++h) {
        phi = (m.coeffs[0] * phi).eval();
        CHECK((irf[h] - phi * irf[0]).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("no dynamics: IRF_0 diagonal, higher horizons zero") {
    Rng rng(77);
    Eigen::MatrixXd y(2000, 2);
    for (int t = 0; t < 2000; ++t) {
        y(t, 0) = 2.0 * rng.normal();
        y(t, 1) = 0.5 * rng.normal();
    }
    VarModel m = var_fit(y, OrderFixed{1});
    m.coeffs[0].setZero();  // exact no-dynamics model
    m.resid_cov = Eigen::Vector2d(4.0, 0.25).asDiagonal();
    auto irf = orth_irf(m, 5);
    CHECK(irf[0](0, 0) == doctest::Approx(2.0));
    CHECK(irf[0](1, 1) == doctest::Approx(0.5));
    CHECK(irf[0](0, 1) == 0.0);
    for (int h = 1; h <= 5; ++h) CHECK(irf[h].cwiseAbs().maxCoeff() == 0.0);

    auto shares = fevd(m, 5);
    for (const auto& s : shares) {
        CHECK(s(0, 0) == doctest::Approx(1.0));
        CHECK(s(1, 1) == doctest::Approx(1.0));
        CHECK(s(0, 1) == doctest::Approx(0.0));
    }
}

TEST_CASE("fevd rows sum to one and match the cumulative-IRF oracle") {
    Eigen::MatrixXd A(2, 2);
    A << 0.6, 0.2, -0.1, 0.4;
    Eigen::MatrixXd L(2, 2);
    L << 1.0, 0.0, 0.4, 0.9;
    Eigen::MatrixXd y = simulate_var1(A, L, 4000, 13);
    VarModel m = var_fit(y, OrderFixed{1});

    const int H = 15;
    auto shares = fevd(m, H);
    auto irf = orth_irf(m, H - 1);
    REQUIRE(shares.size() == H);
    Eigen::MatrixXd cum = Eigen::MatrixXd::Zero(2, 2);
    for (int h = 0; h < H; ++h) {
        cum += irf[h].cwiseProduct(irf[h]);
        for (int i = 0; i < 2; ++i) {
            CHECK(shares[h].row(i).sum() == doctest::Approx(1.0).epsilon(1e-8));
            for (int j = 0; j < 2; ++j)
                CHECK(shares[h](i, j) ==
                      doctest::Approx(cum(i, j) / cum.row(i).sum()).epsilon(1e-8));
        }
    }
}

TEST_CASE("fevd row normalization survives variable permutation") {
    Eigen::MatrixXd A(3, 3);
    A << 0.5, 0.1, 0.0, 0.2, 0.3, 0.1, 0.0, 0.1, 0.4;
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(3, 3);
    L(1, 0) = 0.3;
    L(2, 1) = 0.2;
    Eigen::MatrixXd y = simulate_var1(A, L, 3000, 41);

    Eigen::MatrixXd perm(3000, 3);
    perm.col(0) = y.col(2);
    perm.col(1) = y.col(0);
    perm.col(2) = y.col(1);

    for (const Eigen::MatrixXd& data : {y, perm}) {
        VarModel m = var_fit(data, OrderFixed{1});
        auto shares = fevd(m, 10);
        for (const auto& s : shares)
            for (int i = 0; i < 3; ++i)
                CHECK(s.row(i).sum() == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("stable model IRFs decay") {
    Eigen::MatrixXd A(2, 2);
    A << 0.7, 0.1, 0.0, 0.6;
    Eigen::MatrixXd y = simulate_var1(A, Eigen::MatrixXd::Identity(2, 2), 4000, 17);
    VarModel m = var_fit(y, OrderFixed{1});
    REQUIRE(companion_spectral_radius(m) < 1.0);
    auto irf = orth_irf(m, 60);
    // Beyond a documented horizon the response norm shrinks monotonically.
    double prev = irf[20].norm();
    for (int h = 21; h <= 60; ++h) {
        const double cur = irf[h].norm();
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    CHECK(irf[60].norm() < 1e-3);
}

TEST_CASE("ljung_box direct formula on a tiny series") {
    Series x = {1.0, -0.5, 0.25, 0.8, -0.3, 0.1, -0.7, 0.4, 0.2, -0.6, 0.9, -0.2};
    const int lags = 3;
    auto out = ljung_box(x, lags);

    // Hand computation.
    const int T = static_cast<int>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= T;
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    double Q = 0.0;
    for (int k = 1; k <= lags; ++k) {
        double num = 0.0;
        for (int t = k; t < T; ++t) num += (x[t] - mean) * (x[t - k] - mean);
        const double rho = num / denom;
        Q += rho * rho / (T - k);
    }
    Q *= T * (T + 2.0);
    CHECK(out.Q == doctest::Approx(Q).epsilon(1e-8));
    CHECK(out.p > 0.0);
    CHECK(out.p <= 1.0);
}

TEST_CASE("ljung_box size and power") {
    SUBCASE("iid noise rejection rate is near nominal") {
        int rejections = 0;
        const int n_seeds = 500;
        for (int s = 0; s < n_seeds; ++s) {
            Rng rng(2000 + s);
            Series x(500);
            for (auto& v : x) v = rng.normal();
            if (ljung_box(x, 10).p < 0.05) ++rejections;
        }
        const double rate = static_cast<double>(rejections) / n_seeds;
        CHECK(rate >= 0.02);
        CHECK(rate <= 0.09);
    }
    SUBCASE("AR(1) residuals are detected") {
        Rng rng(33);
        Series x(1000);
        double prev = 0.0;
        for (auto& v : x) {
            prev = 0.5 * prev + rng.normal();
            v = prev;
        }
        CHECK(ljung_box(x, 10).p < 0.01);
    }
}

TEST_CASE("ljung_box error paths") {
    CHECK_THROWS_AS(ljung_box(Series(5, 1.0), 10), SampleSizeError);
    CHECK_THROWS_AS(ljung_box(Series(50, 2.0), 10), DegenerateVarianceError);
}

TEST_CASE("structural shocks whiten the residuals") {
    Eigen::MatrixXd A(2, 2);
    A << 0.5, 0.1, 0.2, 0.3;
    Eigen::MatrixXd L(2, 2);
    L << 1.0, 0.0, 0.7, 0.6;
    Eigen::MatrixXd y = simulate_var1(A, L, 5000, 23);
    VarModel m = var_fit(y, OrderFixed{1});
    Eigen::MatrixXd u = structural_shocks(m);
    Eigen::MatrixXd cov =
        u.transpose() * u / static_cast<double>(u.rows() - 1);
    CHECK((cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("diagonal covariance shocks are scaled residuals; zero row maps to zero") {
    Rng rng(3);
    Eigen::MatrixXd y(1500, 2);
    for (int t = 0; t < 1500; ++t) {
        y(t, 0) = 3.0 * rng.normal();
        y(t, 1) = 0.5 * rng.normal();
    }
    VarModel m = var_fit(y, OrderFixed{1});
    m.resid_cov = Eigen::Vector2d(9.0, 0.25).asDiagonal();
    m.residuals.row(0).setZero();
    Eigen::MatrixXd u = structural_shocks(m);
    CHECK(u.row(0).cwiseAbs().maxCoeff() == 0.0);
    for (int t = 1; t < 20; ++t) {
        CHECK(u(t, 0) == doctest::Approx(m.residuals(t, 0) / 3.0).epsilon(1e-12));
        CHECK(u(t, 1) == doctest::Approx(m.residuals(t, 1) / 0.5).epsilon(1e-12));
    }
}

TEST_CASE("var_fit error paths") {
    Eigen::MatrixXd y(30, 2);
    y.setRandom();
    CHECK_THROWS_AS(var_fit(y, OrderFixed{10}), SampleSizeError);

    Eigen::MatrixXd dup = simulate_var1(Eigen::MatrixXd::Zero(1, 1),
                                        Eigen::MatrixXd::Identity(1, 1), 200, 2);
    Eigen::MatrixXd bad(200, 2);
    bad.col(0) = dup.col(0);
    bad.col(1) = 2.0 * dup.col(0);  // perfectly collinear
    CHECK_THROWS_AS(var_fit(bad, OrderFixed{1}), CollinearityError);
}
