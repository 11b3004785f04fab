#pragma once

#include "cryptotail/gof.hpp"
#include "cryptotail/market_data.hpp"
#include "cryptotail/returns.hpp"
#include "cryptotail/scalar_stats.hpp"
#include "cryptotail/tail.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cryptotail {

/// FNV-1a over a string; used to key per-cell seed streams.
std::uint64_t fnv1a64(std::string_view s);

struct SweepCell {
    std::string exchange_id;  // or "aggregate"
    double delta_t = 0.0;
    Side side = Side::positive;
    Estimator estimator = Estimator::hill;
    std::size_t return_count = 0;
    std::optional<TailFit> fit;
    std::optional<GofResult> gof;
    bool pl_plausible = false;
    std::string error;  // empty when the cell succeeded

    bool ok() const { return error.empty(); }
};

struct SweepOptions {
    std::vector<double> deltas = kDefaultDeltas;
    std::vector<Estimator> estimators{Estimator::hill, Estimator::regression};
    std::vector<Side> sides{Side::positive, Side::negative};
    /// Pool standardized returns of all exchanges into one "aggregate" series per delta.
    bool aggregate = false;
    bool run_gof = true;
    bool drop_zero_returns = false;
    FitOptions fit;
    GofOptions gof;
    /// Cells run concurrently; with fewer cells than workers, each cell uses them all.
    unsigned threads = 1;
    SeedPolicy seeds;
};

/// One cell per (exchange, delta, side, estimator), ordered by that key.
/// Failures are recorded in the cell.
std::vector<SweepCell> sweep(std::span<const ExchangeDataset> datasets, const SweepOptions& options);

struct StudyOptions {
    double delta_t = 300.0;
    std::vector<HalfYearWindow> windows = study_windows();
    Estimator estimator = Estimator::hill;
    bool run_gof = true;
    bool drop_zero_returns = false;
    FitOptions fit;
    GofOptions gof;
    unsigned threads = 1;
    SeedPolicy seeds;
};

struct WindowFit {
    HalfYearWindow window;
    Side side = Side::positive;
    std::size_t return_count = 0;
    std::optional<TailFit> fit;
    std::optional<GofResult> gof;
    std::string note;  // why the window was skipped
};

struct TemporalStudyResult {
    RegressionResult positive;
    RegressionResult negative;
    std::vector<WindowFit> windows;  // window-major, positive side first
    std::size_t gof_tests = 0;
    std::size_t plausible_unadjusted = 0;
    std::size_t plausible_bonferroni = 0;

    const RegressionResult& regression(Side s) const { return s == Side::positive ? positive : negative; }
};

/// Pools per-exchange standardized window slices, fits each side per window,
/// tests each fit and regresses alpha_t on the window index t.
TemporalStudyResult temporal_study(std::span<const ExchangeDataset> datasets, const StudyOptions& options);

struct LiquidityCell {
    std::string exchange_id;
    HalfYearWindow window;
    Side side = Side::positive;
    TailFit fit;
    double mean_daily_usd_volume = 0.0;
};

struct LiquidityStudyResult {
    CorrelationResult positive;
    CorrelationResult negative;
    std::vector<LiquidityCell> cells;
    std::size_t dropped_positive = 0;
    std::size_t dropped_negative = 0;

    const CorrelationResult& correlation(Side s) const { return s == Side::positive ? positive : negative; }
};

/// Per (exchange, window): tail fit per side and mean daily USD volume;
/// Pearson test of alpha against volume per side.
LiquidityStudyResult liquidity_study(std::span<const ExchangeDataset> datasets, const StudyOptions& options);

/// Mean of usd_volume over activity entries whose day starts inside `window`.
/// Returns nullopt when the window holds no entries.
std::optional<double> mean_daily_volume(std::span<const ActivityDay> activity, const HalfYearWindow& window);

}  // namespace cryptotail
