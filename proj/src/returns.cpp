#include "cryptotail/returns.hpp"

#include "cryptotail/calendar.hpp"
#include "cryptotail/error.hpp"

#include <cmath>

namespace cryptotail {

namespace {

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

// Two-pass sample moments; sd uses n - 1.
Moments sample_moments(std::span<const double> v) {
    Moments m;
    if (v.empty()) return m;
    double sum = 0.0;
    for (double x : v) sum += x;
    m.mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) return m;
    double ss = 0.0;
    double comp = 0.0;
    for (double x : v) {
        const double d = x - m.mean;
        ss += d * d;
        comp += d;
    }
    const auto n = static_cast<double>(v.size());
    m.sd = std::sqrt((ss - comp * comp / n) / (n - 1.0));
    return m;
}

}  // namespace

BarSeries resample_bars(const ExchangeDataset& dataset, double delta_t) {
    if (!(delta_t > 0.0) || !std::isfinite(delta_t)) throw DataError("delta_t must be positive");
    if (dataset.size() == 0) throw DataError("no trades");

    BarSeries bars;
    bars.exchange_id = dataset.exchange_id();
    bars.delta_t = delta_t;
    const auto trades = dataset.trades();

    for (const auto& iv : dataset.coverage()) {
        if (iv.end - iv.start < delta_t) {
            ++bars.skipped_intervals;
            continue;
        }
        // Bar k covers (k-1)dt < t <= k dt.
        const auto k_first = static_cast<long long>(std::ceil(iv.start / delta_t));
        const auto k_last = static_cast<long long>(std::ceil(iv.end / delta_t));
        bars.segment_starts.push_back(bars.times.size());

        std::size_t i = iv.first;
        double price = trades[i].price;
        for (long long k = k_first; k <= k_last; ++k) {
            const double close = static_cast<double>(k) * delta_t;
            while (i < iv.last && trades[i].timestamp <= close) {
                price = trades[i].price;
                ++i;
            }
            bars.times.push_back(close);
            bars.prices.push_back(price);
        }
    }
    return bars;
}

ReturnSeries log_returns(const BarSeries& bars, bool drop_zero_returns) {
    ReturnSeries out;
    out.exchange_id = bars.exchange_id;
    out.delta_t = bars.delta_t;
    out.values.reserve(bars.size());
    out.times.reserve(bars.size());
    for (std::size_t s = 0; s < bars.segment_count(); ++s) {
        const auto end = bars.segment_end(s);
        for (auto i = bars.segment_starts[s] + 1; i < end; ++i) {
            const double r = std::log(bars.prices[i] / bars.prices[i - 1]);
            if (drop_zero_returns && r == 0.0) continue;
            out.values.push_back(r);
            out.times.push_back(bars.times[i]);
        }
    }
    if (out.values.empty()) throw DataError("insufficient data");
    const auto m = sample_moments(out.values);
    out.mu = m.mean;
    out.sigma = m.sd;
    return out;
}

ReturnSeries standardize(const ReturnSeries& returns) {
    if (returns.size() < 2) throw DataError("insufficient data");
    const auto m = sample_moments(returns.values);
    if (!(m.sd > 0.0)) throw DataError("degenerate series");

    ReturnSeries out = returns;
    for (double& v : out.values) v = (v - m.mean) / m.sd;
    if (!returns.standardized) {
        out.mu = m.mean;
        out.sigma = m.sd;
    }
    out.standardized = true;
    return out;
}

std::vector<HalfYearWindow> half_year_windows(int year, unsigned month, int count) {
    std::vector<HalfYearWindow> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int t = 0; t < count; ++t) {
        out.push_back({t + 1, add_months(year, month, 6 * t), add_months(year, month, 6 * (t + 1))});
    }
    return out;
}

std::vector<HalfYearWindow> half_year_windows_between(int y0, unsigned m0, int y1, unsigned m1) {
    const int months = (y1 - y0) * 12 + static_cast<int>(m1) - static_cast<int>(m0);
    return half_year_windows(y0, m0, months / 6);
}

std::vector<HalfYearWindow> study_windows() { return half_year_windows_between(2010, 8, 2018, 2); }

std::vector<WindowSlice> window_split(const ReturnSeries& raw,
                                      std::span<const HalfYearWindow> windows) {
    std::vector<WindowSlice> out;
    out.reserve(windows.size());
    for (const auto& w : windows) {
        WindowSlice slice;
        slice.window = w;
        ReturnSeries part;
        part.exchange_id = raw.exchange_id;
        part.delta_t = raw.delta_t;
        part.window_id = w.index;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (w.contains(raw.times[i])) {
                part.times.push_back(raw.times[i]);
                part.values.push_back(raw.values[i]);
            }
        }
        slice.empty = part.values.empty();
        const auto m = sample_moments(part.values);
        part.mu = m.mean;
        part.sigma = m.sd;
        if (part.size() >= 2 && m.sd > 0.0) {
            slice.returns = standardize(part);
            slice.standardized = true;
        } else {
            slice.returns = std::move(part);
        }
        out.push_back(std::move(slice));
    }
    return out;
}

ReturnSeries pool_returns(std::span<const ReturnSeries> parts, std::string exchange_id) {
    ReturnSeries out;
    out.exchange_id = std::move(exchange_id);
    out.standardized = true;
    for (const auto& p : parts) {
        if (!p.standardized) throw DataError("pooling requires standardized series");
        if (out.delta_t == 0.0) out.delta_t = p.delta_t;
        if (!out.window_id) out.window_id = p.window_id;
        out.values.insert(out.values.end(), p.values.begin(), p.values.end());
        out.times.insert(out.times.end(), p.times.begin(), p.times.end());
    }
    return out;
}

ReturnSeries standardized_returns(const ExchangeDataset& dataset, double delta_t,
                                  bool drop_zero_returns) {
    return standardize(log_returns(resample_bars(dataset, delta_t), drop_zero_returns));
}

}  // namespace cryptotail
