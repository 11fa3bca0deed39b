#include "riskpipe/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

namespace riskpipe::stats {

double fisher_f_sf(double f, double df1, double df2) {
    if (df1 <= 0 || df2 <= 0) throw ParameterError("F distribution needs positive dof");
    if (f <= 0.0) return 1.0;
    boost::math::fisher_f dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

double chi2_sf(double x, double df) {
    if (df <= 0) throw ParameterError("chi-squared distribution needs positive dof");
    if (x <= 0.0) return 1.0;
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, x));
}

double student_t_sf(double t, double df) {
    if (df <= 0) throw ParameterError("t distribution needs positive dof");
    boost::math::students_t dist(df);
    return boost::math::cdf(boost::math::complement(dist, t));
}

double normal_cdf(double z) {
    boost::math::normal dist(0.0, 1.0);
    return boost::math::cdf(dist, z);
}

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) throw ShapeError("ols: X rows != y length");
    if (X.rows() < X.cols()) throw SampleSizeError("ols: fewer rows than regressors");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols())
        throw CollinearityError("ols: design matrix is rank deficient (rank " +
                                std::to_string(qr.rank()) + " of " +
                                std::to_string(X.cols()) + ")");
    OlsFit fit;
    fit.beta = qr.solve(y);
    fit.residuals = y - X * fit.beta;
    fit.rss = fit.residuals.squaredNorm();
    return fit;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) throw EmptyInputError("mean of empty vector");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) throw SampleSizeError("sample std needs >= 2 values");
    double m = mean(v), s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace riskpipe::stats
