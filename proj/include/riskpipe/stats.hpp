#pragma once

#include <Eigen/Dense>
#include <vector>

#include "riskpipe/errors.hpp"

namespace riskpipe::stats {

// Survival functions (upper tails) for the reference distributions.
double fisher_f_sf(double f, double df1, double df2);
double chi2_sf(double x, double df);
double student_t_sf(double t, double df);   // one-sided
double normal_cdf(double z);

struct OlsFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd residuals;
    double rss = 0.0;
};

// Least squares of y on X (X includes the intercept column if wanted).
// Throws CollinearityError when X is rank deficient.
OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

double mean(const std::vector<double>& v);
double sample_std(const std::vector<double>& v);  // n-1 denominator

}  // namespace riskpipe::stats
