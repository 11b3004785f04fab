#include "cryptotail/gof.hpp"

#include "cryptotail/error.hpp"
#include "cryptotail/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cryptotail {

double pareto_from_uniform(double u, double alpha, double xmin) {
    return xmin * std::pow(u, -1.0 / alpha);
}

std::vector<double> sample_pareto(double alpha, double xmin, std::size_t n, std::uint64_t seed) {
    if (!(alpha > 0.0) || !(xmin > 0.0)) throw DataError("sample_pareto: alpha and xmin must be positive");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = pareto_from_uniform(uniform_open0(rng), alpha, xmin);
    return out;
}

void sample_pareto_sorted_log_excess(double alpha, std::size_t n, Rng& rng, std::vector<double>& out) {
    // Renyi: the i-th smallest of n Exp(1) draws is sum_{j<=i} Z_j / (n - j + 1),
    // and ln(X / xmin) = E / alpha for X ~ Pareto(alpha, xmin).
    out.resize(n);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        e += -std::log(uniform_open0(rng)) / static_cast<double>(n - i);
        out[i] = e / alpha;
    }
}

double GofResult::quantile(double q) const {
    if (d_synthetic.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> s = d_synthetic;
    std::sort(s.begin(), s.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double gof_p_value(double d_emp, std::span<const double> d_synthetic) {
    if (d_synthetic.empty()) throw DataError("gof: no replicates");
    const auto larger = std::count_if(d_synthetic.begin(), d_synthetic.end(),
                                      [d_emp](double d) { return d > d_emp; });
    return static_cast<double>(larger) / static_cast<double>(d_synthetic.size());
}

namespace {

struct Replicate {
    double d = 0.0;
    std::size_t redraws = 0;
};

double replicate_distance(const TailFit& fit, const GofOptions& options, Rng& rng,
                          std::vector<double>& y) {
    sample_pareto_sorted_log_excess(fit.alpha, fit.n, rng, y);
    if (!options.refit_xmin) {
        const double alpha = fit.estimator == Estimator::hill ? detail::hill_alpha(y)
                                                              : detail::regression_alpha(y);
        return detail::ks_distance(y, alpha, std::numeric_limits<double>::infinity());
    }
    TailSample sample;
    sample.side = fit.side;
    sample.values.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) sample.values[i] = fit.xmin * std::exp(y[i]);
    FitOptions fo = options.fit;
    fo.threads = 1;
    return select_xmin(sample, fit.estimator, fo).ks;
}

}  // namespace

GofResult gof_test(const TailSample& tail, const TailFit& fit, const GofOptions& options,
                   const SeedPolicy& policy) {
    if (options.replicates < 100) throw DataError("gof: at least 100 replicates required");
    if (!(options.confidence > 0.0 && options.confidence < 1.0)) {
        throw DataError("gof: confidence must lie in (0, 1)");
    }
    if (!(fit.alpha > 0.0) || !(fit.xmin > 0.0) || fit.n == 0) throw DataError("gof: invalid fit");
    const auto in_tail = static_cast<std::size_t>(
        std::count_if(tail.values.begin(), tail.values.end(), [&](double v) { return v >= fit.xmin; }));
    if (in_tail != fit.n) throw DataError("gof: fit does not match the tail sample");

    const std::size_t n_rep = options.replicates;
    std::vector<Replicate> reps(n_rep);
    parallel_for(n_rep, options.threads, [&](std::size_t j) {
        std::vector<double> y;
        for (std::size_t attempt = 0;; ++attempt) {
            Rng rng(policy.derive(j + attempt * n_rep));
            try {
                reps[j] = {replicate_distance(fit, options, rng, y), attempt};
                return;
            } catch (const DataError&) {
                if (attempt >= options.max_redraws) throw;
            }
        }
    });

    GofResult r;
    r.estimator = fit.estimator;
    r.side = fit.side;
    r.d_emp = fit.ks;
    r.replicates = n_rep;
    r.master_seed = policy.master_seed;
    r.alpha_hat = fit.alpha;
    r.xmin = fit.xmin;
    r.n = fit.n;
    r.confidence = options.confidence;
    r.refit_xmin = options.refit_xmin;
    r.d_synthetic.reserve(n_rep);
    for (const auto& rep : reps) {
        r.d_synthetic.push_back(rep.d);
        r.redraws += rep.redraws;
    }
    r.p_value = gof_p_value(r.d_emp, r.d_synthetic);
    return r;
}

BonferroniDecision bonferroni_adjust(std::span<const double> p_values, std::size_t m, double confidence) {
    if (m < 1) throw DataError("bonferroni: m must be at least 1");
    BonferroniDecision out;
    out.threshold = (1.0 - confidence) / static_cast<double>(m);
    out.reject.reserve(p_values.size());
    for (double p : p_values) out.reject.push_back(p < out.threshold);
    return out;
}

}  // namespace cryptotail
