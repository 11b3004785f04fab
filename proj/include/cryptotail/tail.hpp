#pragma once

#include "cryptotail/returns.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cryptotail {

enum class Side { positive, negative };
enum class Estimator { hill, regression };

std::string_view to_string(Side side);
std::string_view to_string(Estimator estimator);
Side parse_side(std::string_view s);
Estimator parse_estimator(std::string_view s);

/// Positive magnitudes from one side of a return distribution. The negative
/// side stores |R| of the negative returns.
struct TailSample {
    Side side = Side::positive;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

TailSample make_tail(const ReturnSeries& returns, Side side);

struct TailFit {
    Estimator estimator = Estimator::hill;
    Side side = Side::positive;
    double alpha = 0.0;  // CCDF exponent: P(X > x) ~ x^-alpha
    double xmin = 0.0;
    std::size_t n = 0;  // points with x >= xmin
    /// alpha / sqrt(n) for Hill. Regression fits carry NaN (no standard error).
    double std_error = 0.0;
    double ks = 0.0;

    /// Field-wise, with NaN equal to NaN so regression fits compare equal to themselves.
    friend bool operator==(const TailFit& a, const TailFit& b) {
        auto same = [](double x, double y) { return x == y || (x != x && y != y); };
        return a.estimator == b.estimator && a.side == b.side && same(a.alpha, b.alpha) && same(a.xmin, b.xmin) &&
               a.n == b.n && same(a.std_error, b.std_error) && same(a.ks, b.ks);
    }
};

struct FitOptions {
    std::size_t n_min = 50;
    /// Above this many distinct values the x_min scan uses log-spaced
    /// tail-count candidates instead of every distinct value.
    std::size_t max_candidates = 2000;
    unsigned threads = 1;
};

/// Empirical CCDF Q(x) = #{x_i > x} / n at the distinct sample values, with
/// the standard-normal tail 1 - Phi(x) at the same abscissae.
struct CcdfPoints {
    std::vector<double> x;
    std::vector<double> ccdf;
    std::vector<double> normal_ccdf;

    std::size_t size() const { return x.size(); }
};

CcdfPoints empirical_ccdf(std::span<const double> values);
inline CcdfPoints empirical_ccdf(const TailSample& tail) { return empirical_ccdf(tail.values); }

/// Hill MLE alpha = n / sum ln(x_i / xmin) over x_i >= xmin.
TailFit hill_estimate(const TailSample& tail, double xmin, const FitOptions& options = {});

/// OLS of ln Q(x) on ln x over the distinct tail points with Q(x) > 0;
/// alpha = -slope.
TailFit regression_estimate(const TailSample& tail, double xmin, const FitOptions& options = {});

/// -slope of the least-squares line through (ln x, ln q). Needs >= 3 points
/// with q > 0; points with q == 0 are skipped.
double regression_alpha_from_ccdf(std::span<const double> x, std::span<const double> q);

TailFit fit_tail(const TailSample& tail, Estimator estimator, double xmin,
                 const FitOptions& options = {});

/// max_i max(|F(x_i) - (i-1)/n|, |F(x_i) - i/n|) with F(x) = 1 - (x/xmin)^-alpha.
/// `sorted_tail` must be ascending and >= xmin.
double ks_statistic(std::span<const double> sorted_tail, double alpha, double xmin);

/// Fits alpha for every candidate cutoff and returns the fit with the smallest
/// KS distance; ties go to the smaller xmin. The result does not depend on
/// `options.threads`.
TailFit select_xmin(const TailSample& tail, Estimator estimator, const FitOptions& options = {});

/// Candidate cutoffs the x_min scan evaluates, ascending, for a sorted sample.
std::vector<double> xmin_candidates(std::span<const double> sorted, const FitOptions& options);

namespace detail {

/// Kernels over ascending log-excesses y_i = ln x_i - ln xmin. Every public
/// estimator routes through these so that fits computed on the same points
/// agree bit for bit.
double hill_alpha(std::span<const double> log_excess);
double regression_alpha(std::span<const double> log_excess);
/// Returns early with a value > `bound` once the running maximum exceeds it.
double ks_distance(std::span<const double> log_excess, double alpha, double bound);
/// Fills `out` with ln(x) - ln(xmin) for the ascending values >= xmin.
void log_excess(std::span<const double> sorted_tail, double xmin, std::vector<double>& out);

}  // namespace detail

}  // namespace cryptotail
