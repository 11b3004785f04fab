#include "cryptotail/error.hpp"
#include "cryptotail/gof.hpp"
#include "cryptotail/scalar_stats.hpp"
#include "cryptotail/tail.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace cryptotail;

namespace {

TailSample tail_of(std::vector<double> v, Side side = Side::positive) { return {side, std::move(v)}; }

FitOptions loose() {
    FitOptions o;
    o.n_min = 1;
    return o;
}

std::string error_of(auto&& f) {
    try {
        f();
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Ccdf, SmallExamples) {
    const std::vector<double> v{3, 1, 2};
    const auto c = empirical_ccdf(v);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_DOUBLE_EQ(c.ccdf[0], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.ccdf[1], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.ccdf[2], 0.0);

    const std::vector<double> same{4, 4, 4, 4};
    const auto s = empirical_ccdf(same);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.x[0], 4.0);
    EXPECT_EQ(s.ccdf[0], 0.0);
}

TEST(Ccdf, NormalReference) {
    const std::vector<double> v{0.0, 1.959963984540054};
    const auto c = empirical_ccdf(v);
    EXPECT_NEAR(c.normal_ccdf[0], 0.5, 1e-15);
    EXPECT_NEAR(c.normal_ccdf[1], 0.025, 1e-12);
}

TEST(Ccdf, ParetoMatchesCountingOracle) {
    auto v = sample_pareto(2.5, 1.0, 3000, 17);
    // Force ties.
    for (std::size_t i = 0; i < v.size(); i += 10) v[i] = std::round(v[i] * 4) / 4;
    const auto c = empirical_ccdf(v);
    const auto ref = oracle::ccdf_brute(v);
    ASSERT_EQ(c.size(), ref.size());
    std::size_t i = 0;
    double prev = 1.0;
    for (const auto& [x, q] : ref) {
        EXPECT_EQ(c.x[i], x);
        EXPECT_NEAR(c.ccdf[i], q, 1e-15);
        EXPECT_LE(c.ccdf[i], prev);
        prev = c.ccdf[i];
        ++i;
    }
}

TEST(Hill, ExactLogs) {
    const double e = std::numbers::e;
    const auto fit = hill_estimate(tail_of({e, e, e}), 1.0, loose());
    EXPECT_NEAR(fit.alpha, 1.0, 1e-15);
    EXPECT_NEAR(fit.std_error, 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_EQ(fit.n, 3u);
    EXPECT_EQ(fit.estimator, Estimator::hill);
}

TEST(Hill, Errors) {
    EXPECT_EQ(error_of([] { hill_estimate(tail_of({2, 2, 2}), 2.0, loose()); }), "degenerate tail");
    EXPECT_EQ(error_of([] { hill_estimate(tail_of({1, 2, 3}), 1.0); }).rfind("insufficient tail", 0), 0u);
}

TEST(Hill, ParetoRecovery) {
    const auto v = oracle::pareto_sample(2.5, 1.0, 10000, 101);
    const auto fit = hill_estimate(tail_of(v), 1.0);
    EXPECT_GE(fit.alpha, 2.425);
    EXPECT_LE(fit.alpha, 2.575);
    EXPECT_EQ(fit.n, 10000u);
    EXPECT_DOUBLE_EQ(fit.std_error, fit.alpha / 100.0);
}

TEST(Hill, ScaleEquivariance) {
    const auto v = oracle::pareto_sample(1.7, 1.0, 5000, 7);
    const auto base = hill_estimate(tail_of(v), 1.3);
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
        std::vector<double> w(v);
        for (auto& x : w) x *= c;
        const auto fit = hill_estimate(tail_of(w), 1.3 * c);
        EXPECT_NEAR(fit.alpha, base.alpha, 1e-12 * base.alpha);
        EXPECT_EQ(fit.n, base.n);
    }
}

TEST(Hill, NestedCutoffs) {
    const auto v = oracle::pareto_sample(2.0, 1.0, 4000, 8);
    std::size_t prev = v.size() + 1;
    for (double xmin : {1.0, 1.2, 1.5, 2.0, 3.0, 5.0}) {
        const auto fit = hill_estimate(tail_of(v), xmin);
        EXPECT_LE(fit.n, prev);
        prev = fit.n;
    }
}

TEST(Regression, ExactLine) {
    const std::vector<double> x{1, 2, 4, 8};
    std::vector<double> q;
    for (double v : x) q.push_back(std::pow(v, -2.5));
    EXPECT_NEAR(regression_alpha_from_ccdf(x, q), 2.5, 1e-12);
    const std::vector<double> two{1, 2};
    EXPECT_THROW(regression_alpha_from_ccdf(two, std::vector<double>{1, 0.5}), DataError);
}

TEST(Regression, NeedsThreeDistinctPoints) {
    EXPECT_THROW(regression_estimate(tail_of({1, 2, 2, 2}), 1.0, loose()), DataError);
    const auto fit = regression_estimate(tail_of({1, 2, 3, 4, 5}), 1.0, loose());
    EXPECT_GT(fit.alpha, 0.0);
    EXPECT_TRUE(std::isnan(fit.std_error));
}

TEST(Regression, ParetoSpread) {
    const auto v = oracle::pareto_sample(2.0, 1.0, 100000, 55);
    const auto fit = regression_estimate(tail_of(v), 1.0);
    EXPECT_GE(fit.alpha, 1.85);
    EXPECT_LE(fit.alpha, 2.15);
}

TEST(Regression, AgreesWithHillOnParetoSamples) {
    int agree = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto v = oracle::pareto_sample(2.5, 1.0, 10000, seed);
        const auto h = hill_estimate(tail_of(v), 1.0);
        const auto r = regression_estimate(tail_of(v), 1.0);
        const double se_r = r.alpha / std::sqrt(static_cast<double>(r.n));
        const double combined = std::hypot(h.std_error, se_r);
        agree += std::abs(h.alpha - r.alpha) <= 3.0 * combined ? 1 : 0;
    }
    EXPECT_GE(agree, 19);
}

TEST(Ks, HandCases) {
    const std::vector<double> one{2.0};
    EXPECT_DOUBLE_EQ(ks_statistic(one, 3.0, 2.0), 1.0);
    const std::vector<double> v{1, 2, 4};
    EXPECT_NEAR(ks_statistic(v, 1.0, 1.0), 1.0 / 3.0, 1e-15);
}

TEST(Ks, QuantileStraddle) {
    for (std::size_t n : {1u, 5u, 50u, 1000u}) {
        std::vector<double> v;
        for (std::size_t i = 1; i <= n; ++i) {
            const double p = (static_cast<double>(i) - 0.5) / static_cast<double>(n);
            v.push_back(2.0 * std::pow(1.0 - p, -1.0 / 1.5));
        }
        EXPECT_NEAR(ks_statistic(v, 1.5, 2.0), 0.5 / static_cast<double>(n), 1e-12) << n;
    }
}

TEST(Ks, MatchesBruteForceOnSmallInstances) {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> size(1, 10);
    std::uniform_real_distribution<double> a(0.3, 4.0);
    std::uniform_real_distribution<double> xm(0.1, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double alpha = a(rng);
        const double xmin = xm(rng);
        auto v = oracle::pareto_sample(alpha * 1.3, xmin, static_cast<std::size_t>(size(rng)), rng());
        std::sort(v.begin(), v.end());
        const long double ref = oracle::ks_brute(v, alpha, xmin);
        EXPECT_NEAR(ks_statistic(v, alpha, xmin), static_cast<double>(ref), 1e-14);
    }
}

TEST(Ks, AlwaysInUnitInterval) {
    std::mt19937_64 rng(78);
    std::uniform_real_distribution<double> a(0.05, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto v = oracle::pareto_sample(2.0, 1.0, 30, rng());
        std::sort(v.begin(), v.end());
        const double d = ks_statistic(v, a(rng), 1.0);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
    }
}

TEST(SelectXmin, PureParetoAcrossSeeds) {
    int within = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto v = oracle::pareto_sample(2.5, 1.0, 100000, seed * 31);
        const auto fit = select_xmin(tail_of(v), Estimator::hill);
        std::nth_element(v.begin(), v.begin() + 90000, v.end());
        EXPECT_LT(fit.xmin, v[90000]);
        within += std::abs(fit.alpha - 2.5) <= 3.0 * fit.std_error ? 1 : 0;
        EXPECT_EQ(fit.n, static_cast<std::size_t>(std::count_if(v.begin(), v.end(),
                                                                  [&](double x) { return x >= fit.xmin; })));
    }
    EXPECT_GE(within, 4);
}

TEST(SelectXmin, SplicedSampleFindsSplice) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto v = oracle::spliced_sample(100000, seed);
        const auto fit = select_xmin(tail_of(v), Estimator::hill);
        EXPECT_GE(fit.xmin, 2.5);
        EXPECT_LE(fit.xmin, 10.0);
    }
}

TEST(SelectXmin, ForcedSingleCandidate) {
    const auto v = oracle::pareto_sample(2.0, 1.0, 50, 3);
    const auto fit = select_xmin(tail_of(v), Estimator::hill);
    EXPECT_EQ(fit.xmin, *std::min_element(v.begin(), v.end()));
    EXPECT_EQ(fit.n, 50u);
    EXPECT_THROW(select_xmin(tail_of({v.begin(), v.begin() + 49}), Estimator::hill), DataError);
}

TEST(SelectXmin, XminIsObservedAndFitIsConsistent) {
    const auto v = oracle::spliced_sample(20000, 9);
    for (Estimator est : {Estimator::hill, Estimator::regression}) {
        const auto fit = select_xmin(tail_of(v), est);
        EXPECT_NE(std::find(v.begin(), v.end(), fit.xmin), v.end());
        EXPECT_GE(fit.n, 50u);
        EXPECT_EQ(fit, fit_tail(tail_of(v), est, fit.xmin));
    }
}

TEST(SelectXmin, MinimalDistanceAmongCandidates) {
    const auto v = oracle::spliced_sample(3000, 4);
    const auto fit = select_xmin(tail_of(v), Estimator::hill);
    std::vector<double> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    for (double c : xmin_candidates(sorted, {})) {
        const auto other = hill_estimate(tail_of(v), c);
        EXPECT_GE(other.ks, fit.ks);
        if (other.ks == fit.ks) {
            EXPECT_GE(c, fit.xmin);
        }
    }
}

TEST(SelectXmin, PermutationInvariant) {
    auto v = oracle::spliced_sample(20000, 12);
    const auto a = select_xmin(tail_of(v), Estimator::regression);
    std::mt19937_64 rng(1);
    std::shuffle(v.begin(), v.end(), rng);
    EXPECT_EQ(select_xmin(tail_of(v), Estimator::regression), a);
    std::reverse(v.begin(), v.end());
    EXPECT_EQ(select_xmin(tail_of(v), Estimator::regression), a);
}

TEST(SelectXmin, IndependentOfThreadCount) {
    const auto v = oracle::spliced_sample(50000, 13);
    for (Estimator est : {Estimator::hill, Estimator::regression}) {
        FitOptions o;
        const auto ref = select_xmin(tail_of(v), est, o);
        for (unsigned t : {2u, 4u, 16u}) {
            o.threads = t;
            EXPECT_EQ(select_xmin(tail_of(v), est, o), ref) << t;
        }
    }
}

TEST(SelectXmin, CandidateGrid) {
    std::vector<double> few;
    for (int i = 1; i <= 300; ++i) few.push_back(i);
    FitOptions o;
    const auto c = xmin_candidates(few, o);
    EXPECT_EQ(c.size(), 251u);  // every distinct value leaving at least n_min points
    EXPECT_EQ(c.front(), 1.0);
    EXPECT_EQ(c.back(), 251.0);

    auto many = oracle::pareto_sample(2.0, 1.0, 50000, 5);
    std::sort(many.begin(), many.end());
    const auto g = xmin_candidates(many, o);
    EXPECT_LE(g.size(), o.max_candidates);
    EXPECT_GT(g.size(), o.max_candidates / 2);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
    EXPECT_EQ(g.front(), many.front());
    EXPECT_EQ(std::adjacent_find(g.begin(), g.end()), g.end());
}

TEST(Tail, MakeTailSplitsSides) {
    ReturnSeries r;
    r.values = {-2.0, 0.0, 1.5, -0.5, 3.0};
    const auto pos = make_tail(r, Side::positive);
    const auto neg = make_tail(r, Side::negative);
    EXPECT_EQ(pos.values, (std::vector<double>{1.5, 3.0}));
    EXPECT_EQ(neg.values, (std::vector<double>{2.0, 0.5}));
    EXPECT_EQ(neg.side, Side::negative);
}

TEST(Tail, Names) {
    EXPECT_EQ(parse_side("negative"), Side::negative);
    EXPECT_EQ(parse_estimator("regression"), Estimator::regression);
    EXPECT_THROW(parse_side("up"), Error);
    EXPECT_EQ(to_string(Estimator::hill), "hill");
}
