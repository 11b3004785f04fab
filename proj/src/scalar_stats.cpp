#include "cryptotail/scalar_stats.hpp"

#include "cryptotail/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cryptotail {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_ccdf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

// The mean of equal values can differ from them by an ulp, so test directly.
bool constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 20000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericError("incomplete beta: continued fraction did not converge");
}

// I_x(a, b) with the complement 1 - x supplied separately to avoid cancellation.
double ibeta(double a, double b, double x, double one_minus_x) {
    if (!(a > 0.0) || !(b > 0.0)) throw NumericError("incomplete beta: a and b must be positive");
    if (x <= 0.0) return 0.0;
    if (one_minus_x <= 0.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                             b * std::log(one_minus_x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, one_minus_x) / b;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw NumericError("incomplete beta: x outside [0, 1]");
    return ibeta(a, b, x, 1.0 - x);
}

double student_t_two_tailed(double t, double dof) {
    if (!(dof > 0.0)) throw NumericError("student t: dof must be positive");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    const double t2 = t * t;
    return ibeta(0.5 * dof, 0.5, dof / (dof + t2), t2 / (dof + t2));
}

double student_t_cdf(double x, double dof) {
    if (!(dof > 0.0)) throw NumericError("student t: dof must be positive");
    if (std::isnan(x)) return x;
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    const double tail = 0.5 * student_t_two_tailed(x, dof);
    return x >= 0.0 ? 1.0 - tail : tail;
}

RegressionResult ols_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("ols_fit: x and y differ in length");
    const std::size_t n = x.size();
    if (n < 3) throw DataError("ols_fit: need at least 3 points");
    const auto nd = static_cast<double>(n);
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= nd;
    my /= nd;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0) || constant(x)) throw DataError("degenerate design");

    RegressionResult r;
    r.n = n;
    r.beta1 = sxy / sxx;
    r.beta0 = my - r.beta1 * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - r.beta0 - r.beta1 * x[i];
        rss += e * e;
    }
    const double dof = nd - 2.0;
    r.residual_variance = rss / dof;
    r.se1 = std::sqrt(r.residual_variance / sxx);
    r.se0 = std::sqrt(r.residual_variance * (1.0 / nd + mx * mx / sxx));
    if (rss == 0.0) {
        r.exact_fit = true;
        const double inf = std::numeric_limits<double>::infinity();
        r.t0 = r.beta0 == 0.0 ? 0.0 : std::copysign(inf, r.beta0);
        r.t1 = r.beta1 == 0.0 ? 0.0 : std::copysign(inf, r.beta1);
        r.p0 = 0.0;
        r.p1 = 0.0;
        return r;
    }
    r.t0 = r.beta0 / r.se0;
    r.t1 = r.beta1 / r.se1;
    r.p0 = student_t_two_tailed(r.t0, dof);
    r.p1 = student_t_two_tailed(r.t1, dof);
    return r;
}

CorrelationResult pearson_test(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("pearson_test: x and y differ in length");
    const std::size_t n = x.size();
    if (n < 3) throw DataError("pearson_test: need at least 3 points");
    const auto nd = static_cast<double>(n);
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= nd;
    my /= nd;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0) || constant(x) || constant(y)) {
        throw DataError("pearson_test: zero variance");
    }

    CorrelationResult c;
    c.n = n;
    c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double dof = nd - 2.0;
    if (std::abs(c.r) == 1.0) {
        c.t_stat = std::copysign(std::numeric_limits<double>::infinity(), c.r);
        c.p_value = 0.0;
        return c;
    }
    c.t_stat = c.r * std::sqrt(dof / (1.0 - c.r * c.r));
    c.p_value = student_t_two_tailed(c.t_stat, dof);
    return c;
}

}  // namespace cryptotail
