#pragma once

// Independent reference computations for the unit and acceptance tests.
// Nothing here calls into the library's numerical kernels.

#include <boost/math/distributions/students_t.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <vector>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

/// sup |F - F_n| by evaluating the empirical CDF and its left limit at every
/// sample point through direct counting.
inline long double ks_brute(std::vector<double> xs, double alpha, double xmin) {
    const long double n = static_cast<long double>(xs.size());
    long double d = 0.0L;
    for (double x : xs) {
        std::size_t le = 0;
        std::size_t lt = 0;
        for (double y : xs) {
            le += y <= x ? 1 : 0;
            lt += y < x ? 1 : 0;
        }
        const long double f = 1.0L - std::pow(static_cast<long double>(x) / xmin, -static_cast<long double>(alpha));
        d = std::max(d, std::fabs(f - le / n));
        d = std::max(d, std::fabs(f - lt / n));
    }
    return d;
}

/// (x, #{x_i > x} / n) for every distinct x, by counting.
inline std::map<double, double> ccdf_brute(std::span<const double> xs) {
    std::map<double, double> out;
    for (double x : xs) {
        if (out.count(x)) continue;
        std::size_t above = 0;
        for (double y : xs) above += y > x ? 1 : 0;
        out[x] = static_cast<double>(above) / static_cast<double>(xs.size());
    }
    return out;
}

/// Composite Simpson rule in long double.
inline long double simpson(const std::function<long double(long double)>& f, long double a, long double b,
                           std::size_t intervals) {
    if (intervals % 2) ++intervals;
    const long double h = (b - a) / static_cast<long double>(intervals);
    long double s = f(a) + f(b);
    for (std::size_t i = 1; i < intervals; ++i) {
        s += f(a + h * static_cast<long double>(i)) * (i % 2 ? 4.0L : 2.0L);
    }
    return s * h / 3.0L;
}

inline long double t_density(long double x, long double nu) {
    const long double c = std::exp(std::lgamma((nu + 1.0L) / 2.0L) - std::lgamma(nu / 2.0L)) /
                          std::sqrt(nu * 3.14159265358979323846264338327950288L);
    return c * std::pow(1.0L + x * x / nu, -(nu + 1.0L) / 2.0L);
}

/// P(T <= x) as 1/2 + integral of the density from 0 to x.
inline long double t_cdf_integrated(long double x, long double nu) {
    return 0.5L + simpson([nu](long double u) { return t_density(u, nu); }, 0.0L, x, 200000);
}

inline long double normal_cdf_integrated(long double x) {
    const auto phi = [](long double u) {
        return std::exp(-u * u / 2.0L) / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
    };
    return 0.5L + simpson(phi, 0.0L, x, 200000);
}

struct OlsRef {
    double beta0, beta1, t0, t1, p0, p1;
};

/// OLS in 50-digit arithmetic with Boost's Student-t for the p-values.
inline OlsRef ols_ref(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    Big sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const Big mx = sx / n, my = sy / n;
    Big sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const Big b1 = sxy / sxx;
    const Big b0 = my - b1 * mx;
    Big rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Big e = y[i] - b0 - b1 * x[i];
        rss += e * e;
    }
    const Big s2 = rss / (n - 2);
    const Big se1 = sqrt(s2 / sxx);
    Big sum_x2 = 0;
    for (std::size_t i = 0; i < n; ++i) sum_x2 += Big(x[i]) * x[i];
    const Big se0 = sqrt(s2 * sum_x2 / (n * sxx));
    const Big t0 = b0 / se0, t1 = b1 / se1;
    boost::math::students_t_distribution<Big> dist(n - 2);
    const Big p0 = 2 * cdf(complement(dist, abs(t0)));
    const Big p1 = 2 * cdf(complement(dist, abs(t1)));
    return {b0.convert_to<double>(), b1.convert_to<double>(), t0.convert_to<double>(),
            t1.convert_to<double>(), p0.convert_to<double>(), p1.convert_to<double>()};
}

struct PearsonRef {
    double r, t, p;
};

inline PearsonRef pearson_ref(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    Big sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const Big mx = sx / n, my = sy / n;
    Big sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const Big r = sxy / sqrt(sxx * syy);
    const Big t = r * sqrt(Big(n - 2) / (1 - r * r));
    boost::math::students_t_distribution<Big> dist(n - 2);
    const Big p = 2 * cdf(complement(dist, abs(t)));
    return {r.convert_to<double>(), t.convert_to<double>(), p.convert_to<double>()};
}

/// Trailing mean over the last `w` entries (fewer at the start).
inline std::vector<double> trailing_mean(const std::vector<double>& v, std::size_t w) {
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
        double s = 0.0;
        for (std::size_t j = lo; j <= i; ++j) s += v[j];
        out.push_back(s / static_cast<double>(i - lo + 1));
    }
    return out;
}

/// Bars a sorted timestamp stream produces: each coverage run (split where the
/// gap exceeds `gap`) spanning at least dt contributes the bar closes from the
/// one at or after its first trade through the one at or after its last.
inline std::size_t bar_count_scan(const std::vector<double>& ts, double dt, double gap) {
    std::size_t total = 0;
    std::size_t i = 0;
    while (i < ts.size()) {
        std::size_t j = i;
        while (j + 1 < ts.size() && ts[j + 1] - ts[j] <= gap) ++j;
        if (ts[j] - ts[i] >= dt) {
            auto close = static_cast<long long>(std::ceil(ts[i] / dt));
            std::size_t bars = 1;
            for (std::size_t k = i; k <= j; ++k) {
                while (ts[k] > static_cast<double>(close) * dt) {
                    ++close;
                    ++bars;
                }
            }
            total += bars;
        }
        i = j + 1;
    }
    return total;
}

/// Pareto(alpha, xmin) sample drawn independently of the library sampler.
inline std::vector<double> pareto_sample(double alpha, double xmin, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0xa5a5a5a5ULL);
    std::exponential_distribution<double> e(alpha);
    std::vector<double> out(n);
    for (auto& v : out) v = xmin * std::exp(e(rng));
    return out;
}

/// Exponential(1) body truncated below `splice`, Pareto(alpha, splice) tail
/// with probability `tail_fraction`.
inline std::vector<double> spliced_sample(std::size_t n, std::uint64_t seed, double splice = 5.0,
                                          double alpha = 2.5, double tail_fraction = 0.1) {
    std::mt19937_64 rng(seed ^ 0x5b11ce5ULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> body(1.0);
    std::exponential_distribution<double> tail(alpha);
    std::vector<double> out(n);
    for (auto& v : out) {
        if (u(rng) < tail_fraction) {
            v = splice * std::exp(tail(rng));
        } else {
            do {
                v = body(rng);
            } while (v >= splice || v <= 0.0);
        }
    }
    return out;
}

}  // namespace oracle
