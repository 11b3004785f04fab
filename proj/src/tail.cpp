#include "cryptotail/tail.hpp"

#include "cryptotail/error.hpp"
#include "cryptotail/parallel.hpp"
#include "cryptotail/scalar_stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>

namespace cryptotail {

std::string_view to_string(Side side) { return side == Side::positive ? "positive" : "negative"; }

std::string_view to_string(Estimator estimator) {
    return estimator == Estimator::hill ? "hill" : "regression";
}

Side parse_side(std::string_view s) {
    if (s == "positive" || s == "pos" || s == "+") return Side::positive;
    if (s == "negative" || s == "neg" || s == "-") return Side::negative;
    throw Error("unknown tail side '" + std::string(s) + "'");
}

Estimator parse_estimator(std::string_view s) {
    if (s == "hill") return Estimator::hill;
    if (s == "regression" || s == "reg") return Estimator::regression;
    throw Error("unknown estimator '" + std::string(s) + "'");
}

TailSample make_tail(const ReturnSeries& returns, Side side) {
    TailSample tail;
    tail.side = side;
    for (double v : returns.values) {
        if (side == Side::positive && v > 0.0) tail.values.push_back(v);
        if (side == Side::negative && v < 0.0) tail.values.push_back(-v);
    }
    return tail;
}

CcdfPoints empirical_ccdf(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    CcdfPoints out;
    const auto n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
        out.x.push_back(sorted[i]);
        out.ccdf.push_back(static_cast<double>(sorted.size() - 1 - i) / n);
        out.normal_ccdf.push_back(normal_ccdf(sorted[i]));
    }
    return out;
}

namespace detail {

double hill_alpha(std::span<const double> log_excess) {
    double sum = 0.0;
    for (double y : log_excess) sum += y;
    if (!(sum > 0.0)) throw DataError("degenerate tail");
    return static_cast<double>(log_excess.size()) / sum;
}

double regression_alpha(std::span<const double> log_excess) {
    const std::size_t k = log_excess.size();
    const auto kd = static_cast<double>(k);
    // Points (y_j, ln Q(y_j)) at the last index of each tie group with Q > 0.
    double sx = 0.0;
    double sy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (log_excess[i + 1] == log_excess[i]) continue;
        sx += log_excess[i];
        sy += std::log(static_cast<double>(k - 1 - i) / kd);
        ++m;
    }
    if (m < 3) throw DataError("insufficient tail: regression needs at least 3 distinct points");
    const double mx = sx / static_cast<double>(m);
    const double my = sy / static_cast<double>(m);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (log_excess[i + 1] == log_excess[i]) continue;
        const double dx = log_excess[i] - mx;
        const double dy = std::log(static_cast<double>(k - 1 - i) / kd) - my;
        sxy += dx * dy;
        sxx += dx * dx;
    }
    const double alpha = -sxy / sxx;
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DataError("degenerate tail");
    return alpha;
}

double ks_distance(std::span<const double> log_excess, double alpha, double bound) {
    const auto k = static_cast<double>(log_excess.size());
    double d = 0.0;
    for (std::size_t i = 0; i < log_excess.size(); ++i) {
        const double f = -std::expm1(-alpha * log_excess[i]);
        const double below = static_cast<double>(i) / k;
        const double above = static_cast<double>(i + 1) / k;
        d = std::max(d, std::max(f - below, above - f));
        if (d > bound) return d;
    }
    return d;
}

void log_excess(std::span<const double> sorted_tail, double xmin, std::vector<double>& out) {
    const double lmin = std::log(xmin);
    out.clear();
    for (double x : sorted_tail) {
        if (x >= xmin) out.push_back(std::log(x) - lmin);
    }
}

}  // namespace detail

namespace {

std::vector<double> sorted_copy(std::span<const double> v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return s;
}

double alpha_for(Estimator estimator, std::span<const double> y) {
    return estimator == Estimator::hill ? detail::hill_alpha(y) : detail::regression_alpha(y);
}

TailFit fit_sorted(std::span<const double> sorted, Side side, Estimator estimator, double xmin,
                   const FitOptions& options) {
    if (!(xmin > 0.0) || !std::isfinite(xmin)) throw DataError("xmin must be positive");
    std::vector<double> y;
    detail::log_excess(sorted, xmin, y);
    if (y.size() < std::max<std::size_t>(options.n_min, 1)) {
        throw DataError("insufficient tail: " + std::to_string(y.size()) + " points >= xmin, need " +
                        std::to_string(options.n_min));
    }
    TailFit fit;
    fit.estimator = estimator;
    fit.side = side;
    fit.xmin = xmin;
    fit.n = y.size();
    fit.alpha = alpha_for(estimator, y);
    fit.std_error = estimator == Estimator::hill
                        ? fit.alpha / std::sqrt(static_cast<double>(fit.n))
                        : std::numeric_limits<double>::quiet_NaN();
    fit.ks = detail::ks_distance(y, fit.alpha, std::numeric_limits<double>::infinity());
    return fit;
}

}  // namespace

TailFit hill_estimate(const TailSample& tail, double xmin, const FitOptions& options) {
    return fit_sorted(sorted_copy(tail.values), tail.side, Estimator::hill, xmin, options);
}

TailFit regression_estimate(const TailSample& tail, double xmin, const FitOptions& options) {
    return fit_sorted(sorted_copy(tail.values), tail.side, Estimator::regression, xmin, options);
}

TailFit fit_tail(const TailSample& tail, Estimator estimator, double xmin, const FitOptions& options) {
    return fit_sorted(sorted_copy(tail.values), tail.side, estimator, xmin, options);
}

double regression_alpha_from_ccdf(std::span<const double> x, std::span<const double> q) {
    if (x.size() != q.size()) throw DataError("x and q differ in length");
    double sx = 0.0;
    double sy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (q[i] > 0.0 && x[i] > 0.0) {
            sx += std::log(x[i]);
            sy += std::log(q[i]);
            ++m;
        }
    }
    if (m < 3) throw DataError("insufficient tail: regression needs at least 3 points");
    const double mx = sx / static_cast<double>(m);
    const double my = sy / static_cast<double>(m);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (q[i] > 0.0 && x[i] > 0.0) {
            const double dx = std::log(x[i]) - mx;
            sxy += dx * (std::log(q[i]) - my);
            sxx += dx * dx;
        }
    }
    if (!(sxx > 0.0)) throw DataError("degenerate tail");
    return -sxy / sxx;
}

double ks_statistic(std::span<const double> sorted_tail, double alpha, double xmin) {
    std::vector<double> y;
    detail::log_excess(sorted_tail, xmin, y);
    if (y.size() != sorted_tail.size()) throw DataError("ks_statistic: values below xmin");
    if (y.empty()) return 0.0;
    return detail::ks_distance(y, alpha, std::numeric_limits<double>::infinity());
}

std::vector<double> xmin_candidates(std::span<const double> sorted, const FitOptions& options) {
    const std::size_t n = sorted.size();
    const std::size_t n_min = std::max<std::size_t>(options.n_min, 1);
    std::vector<std::size_t> starts;  // first index of each tie group leaving >= n_min points
    for (std::size_t s = 0; s < n && n - s >= n_min; ++s) {
        if (s == 0 || sorted[s] != sorted[s - 1]) starts.push_back(s);
    }
    const std::size_t budget = std::max<std::size_t>(options.max_candidates, 2);
    if (starts.size() > budget) {
        // Log-spaced tail counts between n_min and n, snapped to tie-group starts.
        std::vector<std::size_t> picked;
        const double ratio = static_cast<double>(n) / static_cast<double>(n_min);
        for (std::size_t j = 0; j < budget; ++j) {
            const double k = static_cast<double>(n_min) *
                             std::pow(ratio, static_cast<double>(j) / static_cast<double>(budget - 1));
            auto s = n - std::min(n, static_cast<std::size_t>(std::llround(k)));
            while (s > 0 && sorted[s] == sorted[s - 1]) --s;
            picked.push_back(s);
        }
        std::sort(picked.begin(), picked.end());
        picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
        starts = std::move(picked);
    }
    std::vector<double> out;
    out.reserve(starts.size());
    for (auto s : starts) out.push_back(sorted[s]);
    return out;
}

TailFit select_xmin(const TailSample& tail, Estimator estimator, const FitOptions& options) {
    const auto sorted = sorted_copy(tail.values);
    if (sorted.size() < std::max<std::size_t>(options.n_min, 1)) {
        throw DataError("insufficient tail: " + std::to_string(sorted.size()) + " points, need " +
                        std::to_string(options.n_min));
    }
    if (!(sorted.front() > 0.0)) throw DataError("tail values must be positive");
    const auto candidates = xmin_candidates(sorted, options);
    if (candidates.empty()) throw DataError("insufficient tail: no candidate cutoff");

    std::vector<double> logs(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) logs[i] = std::log(sorted[i]);

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(candidates.size(), inf);
    std::atomic<double> bound{inf};
    const std::size_t c_count = candidates.size();

    // Largest cutoffs first: they are cheap and give an early pruning bound.
    // A candidate is abandoned only once its partial distance exceeds the
    // distance of some fully evaluated candidate, so it cannot be the minimum.
    parallel_for(c_count, options.threads, [&](std::size_t job) {
        const std::size_t c = c_count - 1 - job;
        const auto first = static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), candidates[c]) - sorted.begin());
        std::vector<double> y(sorted.size() - first);
        for (std::size_t i = first; i < sorted.size(); ++i) y[i - first] = logs[i] - logs[first];
        double alpha = 0.0;
        try {
            alpha = alpha_for(estimator, y);
        } catch (const DataError&) {
            return;
        }
        const double b = bound.load();
        const double d = detail::ks_distance(y, alpha, b);
        if (d > b) return;
        dist[c] = d;
        double cur = bound.load();
        while (d < cur && !bound.compare_exchange_weak(cur, d)) {
        }
    });

    std::size_t best = c_count;
    for (std::size_t c = 0; c < c_count; ++c) {
        if (dist[c] < inf && (best == c_count || dist[c] < dist[best])) best = c;
    }
    if (best == c_count) throw DataError("insufficient tail: no candidate produced a fit");
    return fit_sorted(sorted, tail.side, estimator, candidates[best], options);
}

}  // namespace cryptotail
