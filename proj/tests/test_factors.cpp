#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "riskpipe/factors.hpp"
#include "riskpipe/features.hpp"
#include "riskpipe/rng.hpp"

using namespace riskpipe;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("pca: two perfectly correlated columns load on one component") {
    Eigen::MatrixXd x = random_matrix(500, 1, 42);
    Eigen::MatrixXd data(500, 2);
    data.col(0) = x.col(0);
    data.col(1) = 2.0 * x.col(0);  // same correlation structure
    PcaModel m = pca_fit(data, KeepK{1});
    CHECK(m.explained_ratio(0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pca: independent noise splits variance evenly") {
    Eigen::MatrixXd data = random_matrix(10000, 2, 7);
    PcaModel m = pca_fit(data, KeepK{2});
    CHECK(std::abs(m.explained_ratio(0) - 0.5) < 0.05);
    CHECK(std::abs(m.explained_ratio(1) - 0.5) < 0.05);
    CHECK(m.explained_ratio(0) >= m.explained_ratio(1));
    CHECK(m.explained_ratio.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pca loadings are orthonormal with the documented sign rule") {
    Eigen::MatrixXd data = random_matrix(400, 5, 9);
    // correlate the columns a bit
    for (int j = 1; j < 5; ++j) data.col(j) += 0.5 * data.col(0);
    PcaModel m = pca_fit(data, KeepK{5});
    Eigen::MatrixXd gram = m.loadings.transpose() * m.loadings;
    CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
    for (int j = 0; j < 5; ++j) {
        Eigen::Index arg;
        m.loadings.col(j).cwiseAbs().maxCoeff(&arg);
        CHECK(m.loadings(arg, j) > 0.0);
    }
}

TEST_CASE("pca scores match an independent SVD of the standardized matrix") {
    Eigen::MatrixXd data = random_matrix(300, 4, 21);
    for (int j = 1; j < 4; ++j) data.col(j) += 0.3 * j * data.col(0);
    PcaModel m = pca_fit(data, KeepK{4});
    Eigen::MatrixXd scores = pca_transform(m, data);

    // Oracle: SVD route on the same standardization.
    Eigen::MatrixXd z = data;
    for (int j = 0; j < 4; ++j)
        z.col(j) = (data.col(j).array() - m.means(j)) / m.stds(j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXd oracle = z * svd.matrixV();
    for (int j = 0; j < 4; ++j) {
        // SVD sign is arbitrary; compare up to a per-column flip.
        const double same = (scores.col(j) - oracle.col(j)).cwiseAbs().maxCoeff();
        const double flip = (scores.col(j) + oracle.col(j)).cwiseAbs().maxCoeff();
        CHECK(std::min(same, flip) < 1e-8);
    }
}

TEST_CASE("pca_transform identities") {
    Eigen::MatrixXd data = random_matrix(200, 3, 33);
    PcaModel m = pca_fit(data, KeepK{3});

    // Column means map to the origin.
    Eigen::MatrixXd at_mean = m.means.transpose();
    Eigen::MatrixXd scores = pca_transform(m, at_mean);
    CHECK(scores.cwiseAbs().maxCoeff() < 1e-10);

    // Full reconstruction returns the standardized data.
    Eigen::MatrixXd all_scores = pca_transform(m, data);
    Eigen::MatrixXd recon = all_scores * m.loadings.transpose();
    Eigen::MatrixXd z = data;
    for (int j = 0; j < 3; ++j)
        z.col(j) = (data.col(j).array() - m.means(j)) / m.stds(j);
    CHECK((recon - z).cwiseAbs().maxCoeff() < 1e-8);

    CHECK_THROWS_AS(pca_transform(m, random_matrix(5, 2, 1)), ShapeError);
}

TEST_CASE("pca rejects constant columns by name") {
    Eigen::MatrixXd data = random_matrix(100, 2, 3);
    data.col(1).setConstant(4.0);
    CHECK_THROWS_AS(pca_fit(data, KeepK{1}, {"good", "flat"}), DegenerateVarianceError);
    try {
        pca_fit(data, KeepK{1}, {"good", "flat"});
    } catch (const DegenerateVarianceError& e) {
        CHECK(std::string(e.what()).find("flat") != std::string::npos);
    }
}

TEST_CASE("pca cumulative-variance keep rule") {
    Eigen::MatrixXd base = random_matrix(2000, 1, 5);
    Eigen::MatrixXd data(2000, 3);
    Rng rng(6);
    for (int i = 0; i < 2000; ++i) {
        data(i, 0) = base(i, 0);
        data(i, 1) = base(i, 0) + 0.1 * rng.normal();
        data(i, 2) = rng.normal();
    }
    PcaModel m = pca_fit(data, KeepCumVariance{0.6});
    CHECK(m.loadings.cols() == 1);  // first PC carries ~2/3 of the correlation mass
    PcaModel m2 = pca_fit(data, KeepCumVariance{1.0});
    CHECK(m2.loadings.cols() == 3);
}

// Score columns with exactly zero mean and unit sample std whose first row is
// (v, -v): the standardized z at row 0 is then v itself.
static Eigen::MatrixXd exact_standard_scores(const std::vector<double>& first_row) {
    const int fill_pairs = 50, T = 2 + 2 * fill_pairs;
    Eigen::MatrixXd scores(T, first_row.size());
    for (size_t j = 0; j < first_row.size(); ++j) {
        const double v = first_row[j];
        const double c = std::sqrt((T - 1 - 2.0 * v * v) / (2.0 * fill_pairs));
        scores(0, j) = v;
        scores(1, j) = -v;
        for (int k = 0; k < fill_pairs; ++k) {
            scores(2 + 2 * k, j) = c;
            scores(3 + 2 * k, j) = -c;
        }
    }
    return scores;
}

TEST_CASE("crowding target hand value sqrt(25/2) at z=(3,4)") {
    Eigen::MatrixXd scores = exact_standard_scores({3.0, 4.0});
    CrowdingSpec spec;
    spec.K = 2;
    Series target = crowding_target(scores, spec);
    CHECK(target[0] == doctest::Approx(std::sqrt(25.0 / 2.0)).epsilon(1e-9));
    for (double v : target)
        if (!is_missing(v)) CHECK(v >= 0.0);
}

TEST_CASE("crowding: unit scores give 1, zeros give 0") {
    // +/-1 alternating column has mean 0, sample std ~1; K=1.
    const int T = 10000;
    Eigen::MatrixXd scores(T, 1);
    for (int t = 0; t < T; ++t) scores(t, 0) = t % 2 == 0 ? 1.0 : -1.0;
    CrowdingSpec spec;
    spec.K = 1;
    Series target = crowding_target(scores, spec);
    CHECK(target[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(target[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("crowding leave-out and parameter guards") {
    Eigen::MatrixXd scores = random_matrix(100, 2, 10);
    CrowdingSpec spec;
    spec.K = 2;
    spec.leave_out = {1, 2};
    CHECK_THROWS_AS(crowding_target(scores, spec), ParameterError);
    spec.leave_out = {3};
    CHECK_THROWS_AS(crowding_target(scores, spec), ParameterError);
}

TEST_CASE("crowding invariant under sign flips (full-sample)") {
    Eigen::MatrixXd scores = random_matrix(500, 3, 11);
    CrowdingSpec spec;
    spec.K = 3;
    Series a = crowding_target(scores, spec);
    Eigen::MatrixXd flipped = scores;
    flipped.col(1) = -flipped.col(1);
    Series b = crowding_target(flipped, spec);
    for (size_t t = 0; t < a.size(); ++t)
        CHECK(a[t] == doctest::Approx(b[t]).epsilon(1e-10));
}

TEST_CASE("legacy rv targets") {
    SUBCASE("constant return") {
        Series r(40, 0.02);
        auto out = legacy_rv_targets(r, 20);
        for (int t = 0; t < 13; ++t) CHECK(is_missing(out.market_rv14[t]));
        // Frozen closed form sqrt(14)*|c|.
        CHECK(out.market_rv14[13] ==
              doctest::Approx(3.7416573867739413 * 0.02).epsilon(1e-12));
        // Constant rv14 has zero rolling std -> rs variant all missing.
        for (double v : out.market_rv14_rs) CHECK(is_missing(v));
    }
    SUBCASE("zero returns") {
        Series r(30, 0.0);
        auto out = legacy_rv_targets(r, 20);
        CHECK(out.market_rv14[20] == 0.0);
    }
    SUBCASE("too short") {
        CHECK_THROWS_AS(legacy_rv_targets(Series(5, 0.1)), SampleSizeError);
    }
}

TEST_CASE("risk index basics") {
    const int T = 60;
    RiskIndexSpec spec;
    spec.H = 10;
    spec.feat_window = 5;
    spec.shock_window = 5;

    SUBCASE("all zero inputs give zero index") {
        Eigen::MatrixXd f = Eigen::MatrixXd::Zero(T, 2);
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(T, 2);
        Series idx = risk_index(f, s, spec);
        bool any = false;
        for (double v : idx)
            if (!is_missing(v)) {
                CHECK(v == 0.0);
                any = true;
            }
        CHECK(any);
    }

    SUBCASE("H=1 equals sigma + |shock| exactly") {
        Rng rng(4);
        Eigen::MatrixXd f(T, 1), s(T, 1);
        for (int t = 0; t < T; ++t) {
            f(t, 0) = rng.normal();
            s(t, 0) = rng.normal();
        }
        RiskIndexSpec h1 = spec;
        h1.H = 1;
        Series idx = risk_index(f, s, h1);
        // Reimplement the two trailing pieces directly.
        Series fm(T), sm(T);
        for (int t = 0; t < T; ++t) {
            fm[t] = f(t, 0);
            sm[t] = std::abs(s(t, 0));
        }
        Series sigma = rolling_std(fm, 5), shock = rolling_mean(sm, 5);
        for (int t = 0; t < T; ++t) {
            if (is_missing(sigma[t]) || is_missing(shock[t]))
                CHECK(is_missing(idx[t]));
            else
                CHECK(idx[t] == doctest::Approx(sigma[t] + shock[t]).epsilon(1e-12));
        }
    }

    SUBCASE("doubling both inputs doubles the index") {
        Rng rng(14);
        Eigen::MatrixXd f(T, 2), s(T, 2);
        for (int t = 0; t < T; ++t)
            for (int j = 0; j < 2; ++j) {
                f(t, j) = rng.normal();
                s(t, j) = rng.normal();
            }
        Series a = risk_index(f, s, spec);
        Series b = risk_index(2.0 * f, 2.0 * s, spec);
        for (size_t t = 0; t < a.size(); ++t) {
            if (is_missing(a[t]))
                CHECK(is_missing(b[t]));
            else
                CHECK(b[t] == doctest::Approx(2.0 * a[t]).epsilon(1e-10));
        }
    }
}

TEST_CASE("forward label alignment uses only (t, t+H]") {
    // Row-ordinal probe: series value = t. Label at t must equal t + H.
    const int T = 30, H = 10;
    Series s(T);
    for (int t = 0; t < T; ++t) s[t] = t;
    Series label = forward_label(s, H);
    for (int t = 0; t < T; ++t) {
        if (t + H < T)
            CHECK(label[t] == doctest::Approx(static_cast<double>(t + H)));
        else
            CHECK(is_missing(label[t]));
    }
}
