#pragma once

#include "cryptotail/market_data.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cryptotail {

/// Default bar intervals in seconds: 1m, 5m, 10m, 30m, 1h, 4h, 1d.
inline const std::vector<double> kDefaultDeltas{60, 300, 600, 1800, 3600, 14400, 86400};

/// Evenly spaced last-trade prices. Bars of consecutive coverage intervals are
/// stored back to back; `segment_starts[s]` is the first bar of segment s.
struct BarSeries {
    std::string exchange_id;
    double delta_t = 0.0;
    std::vector<double> times;   // bar-close instants, multiples of delta_t
    std::vector<double> prices;  // last trade in (t - delta_t, t], carried forward
    std::vector<std::size_t> segment_starts;
    std::size_t skipped_intervals = 0;  // coverage intervals shorter than delta_t

    std::size_t size() const { return times.size(); }
    std::size_t segment_count() const { return segment_starts.size(); }
    std::size_t segment_end(std::size_t s) const {
        return s + 1 < segment_starts.size() ? segment_starts[s + 1] : times.size();
    }
};

struct ReturnSeries {
    std::string exchange_id;
    double delta_t = 0.0;
    std::vector<double> times;   // bar-close instant of the later bar
    std::vector<double> values;  // raw log-returns or standardized returns
    bool standardized = false;
    double mu = 0.0;     // sample mean of the raw returns
    double sigma = 0.0;  // sample (n-1) standard deviation of the raw returns
    std::optional<int> window_id;

    std::size_t size() const { return values.size(); }
};

struct HalfYearWindow {
    int index = 0;  // 1-based
    double start = 0.0;
    double end = 0.0;  // exclusive

    bool contains(double t) const { return t >= start && t < end; }
};

BarSeries resample_bars(const ExchangeDataset& dataset, double delta_t);

/// ln P_t - ln P_{t-dt} for consecutive bars inside each segment. With
/// `drop_zero_returns`, exact zeros (carried-forward bars) are removed.
ReturnSeries log_returns(const BarSeries& bars, bool drop_zero_returns = false);

/// (R - mu) / sigma with sample mean and (n-1) standard deviation.
ReturnSeries standardize(const ReturnSeries& returns);

/// `count` consecutive six-month windows starting at (year, month).
std::vector<HalfYearWindow> half_year_windows(int year, unsigned month, int count);

/// Six-month windows from (y0, m0) up to (y1, m1) exclusive.
std::vector<HalfYearWindow> half_year_windows_between(int y0, unsigned m0, int y1, unsigned m1);

/// Aug 2010 - Feb 2018, fifteen windows.
std::vector<HalfYearWindow> study_windows();

struct WindowSlice {
    HalfYearWindow window;
    ReturnSeries returns;  // standardized when `standardized`, else raw
    bool empty = true;
    bool standardized = false;
};

/// Assigns each return to the window containing its bar-close instant and
/// standardizes every slice that has at least two distinct values.
std::vector<WindowSlice> window_split(const ReturnSeries& raw,
                                      std::span<const HalfYearWindow> windows);

/// Concatenate already-standardized series into one pooled series.
ReturnSeries pool_returns(std::span<const ReturnSeries> parts, std::string exchange_id = "aggregate");

/// resample_bars -> log_returns -> standardize.
ReturnSeries standardized_returns(const ExchangeDataset& dataset, double delta_t,
                                  bool drop_zero_returns = false);

}  // namespace cryptotail
