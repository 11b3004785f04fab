#pragma once

#include <cstddef>
#include <span>

namespace cryptotail {

/// Standard normal CDF via erfc.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate far into the tail.
double normal_ccdf(double x);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Student-t CDF with `dof` degrees of freedom (dof > 0).
double student_t_cdf(double x, double dof);

/// 2 * P(T > |t|).
double student_t_two_tailed(double t, double dof);

struct RegressionResult {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double se0 = 0.0;
    double se1 = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    double p0 = 1.0;
    double p1 = 1.0;
    std::size_t n = 0;
    double residual_variance = 0.0;
    /// Residual variance is exactly zero: t-statistics are infinite and the
    /// p-values are reported as 0.
    bool exact_fit = false;
};

/// y = beta0 + beta1 * x by ordinary least squares, with two-tailed t-tests on
/// n - 2 degrees of freedom.
RegressionResult ols_fit(std::span<const double> x, std::span<const double> y);

struct CorrelationResult {
    double r = 0.0;
    std::size_t n = 0;
    double t_stat = 0.0;
    double p_value = 1.0;
};

/// Pearson correlation with the two-tailed t-test r sqrt((n-2)/(1-r^2)).
CorrelationResult pearson_test(std::span<const double> x, std::span<const double> y);

}  // namespace cryptotail
