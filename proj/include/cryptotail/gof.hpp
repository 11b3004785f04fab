#pragma once

#include "cryptotail/rng.hpp"
#include "cryptotail/tail.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cryptotail {

/// Inverse transform of one uniform u in (0, 1]: xmin * u^(-1/alpha).
double pareto_from_uniform(double u, double alpha, double xmin);

/// n independent Pareto(alpha, xmin) draws, deterministic per seed.
std::vector<double> sample_pareto(double alpha, double xmin, std::size_t n, std::uint64_t seed);

/// n Pareto(alpha, xmin) order statistics in ascending order, generated
/// directly from exponential spacings (no sort). Returned as log-excesses
/// ln(x / xmin).
void sample_pareto_sorted_log_excess(double alpha, std::size_t n, Rng& rng, std::vector<double>& out);

struct GofOptions {
    std::size_t replicates = 1000;
    double confidence = 0.95;
    /// Re-run the x_min scan on every replicate instead of holding x_min fixed.
    bool refit_xmin = false;
    /// Fit settings used for the replicates (and the scan when refit_xmin).
    FitOptions fit;
    unsigned threads = 1;
    /// Redraws allowed per replicate before the test gives up.
    std::size_t max_redraws = 100;
};

struct GofResult {
    Estimator estimator = Estimator::hill;
    Side side = Side::positive;
    double d_emp = 0.0;
    std::size_t replicates = 0;
    std::vector<double> d_synthetic;
    double p_value = 0.0;
    std::uint64_t master_seed = 0;
    double alpha_hat = 0.0;
    double xmin = 0.0;
    std::size_t n = 0;
    double confidence = 0.95;
    bool refit_xmin = false;
    std::size_t redraws = 0;

    bool reject() const { return p_value < 1.0 - confidence; }
    bool plausible() const { return !reject(); }
    /// Linear-interpolated quantile of the replicate distances.
    double quantile(double q) const;

    friend bool operator==(const GofResult&, const GofResult&) = default;
};

/// Fraction of replicate distances strictly larger than d_emp.
double gof_p_value(double d_emp, std::span<const double> d_synthetic);

/// Resampling test of the power-law hypothesis for `fit` on `tail`.
GofResult gof_test(const TailSample& tail, const TailFit& fit, const GofOptions& options,
                   const SeedPolicy& policy);

struct BonferroniDecision {
    double threshold = 0.0;  // (1 - confidence) / m
    std::vector<bool> reject;
};

BonferroniDecision bonferroni_adjust(std::span<const double> p_values, std::size_t m,
                                     double confidence = 0.95);

}  // namespace cryptotail
