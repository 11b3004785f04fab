#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cryptotail {

/// One executed transaction. Timestamp is Unix seconds (UTC), price in USD
/// per BTC, quantity in BTC.
struct Trade {
    double timestamp = 0.0;
    double price = 0.0;
    double quantity = 0.0;

    friend bool operator==(const Trade&, const Trade&) = default;
};

/// Contiguous span of trade data. `first`/`last` index the dataset's trade
/// vector as a half-open range.
struct CoverageInterval {
    double start = 0.0;
    double end = 0.0;
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t trade_count() const { return last - first; }
    friend bool operator==(const CoverageInterval&, const CoverageInterval&) = default;
};

struct RejectedLine {
    std::size_t line = 0;
    std::string field;
    std::string reason;

    friend bool operator==(const RejectedLine&, const RejectedLine&) = default;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    bool header_skipped = false;
    /// First few rejected lines, for diagnostics. `rejected` holds the full count.
    std::vector<RejectedLine> rejected_samples;

    friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

struct IngestOptions {
    /// Consecutive trades further apart than this (seconds) split coverage.
    double gap_threshold = 86400.0;
    /// Throw IngestError on the first rejected line instead of counting it.
    bool strict = false;
};

inline constexpr std::size_t kMaxRejectedSamples = 20;

/// Trades of one exchange, sorted by timestamp, with coverage split at gaps.
/// Immutable once built.
class ExchangeDataset {
public:
    ExchangeDataset(std::string exchange_id, std::vector<Trade> trades,
                    std::vector<CoverageInterval> coverage, IngestReport report);

    const std::string& exchange_id() const { return exchange_id_; }
    std::span<const Trade> trades() const { return trades_; }
    const std::vector<CoverageInterval>& coverage() const { return coverage_; }
    const IngestReport& report() const { return report_; }
    std::size_t size() const { return trades_.size(); }

    friend bool operator==(const ExchangeDataset&, const ExchangeDataset&) = default;

private:
    std::string exchange_id_;
    std::vector<Trade> trades_;
    std::vector<CoverageInterval> coverage_;
    IngestReport report_;
};

/// Parse `timestamp,price,quantity` CSV from a stream. A header line is
/// detected by a non-numeric first field; `#` lines are comments. Throws DataError("no trades") when
/// nothing is accepted.
ExchangeDataset ingest_trades(std::istream& source, std::string exchange_id,
                              const IngestOptions& options = {});

/// Same as ingest_trades for a plain or gzip-compressed file.
ExchangeDataset ingest_file(const std::filesystem::path& path, std::string exchange_id,
                            const IngestOptions& options = {});

/// Build a dataset from in-memory trades: validates, stable-sorts and splits
/// coverage exactly like the CSV path.
ExchangeDataset make_dataset(std::string exchange_id, std::vector<Trade> trades,
                             const IngestOptions& options = {});

/// Coverage intervals of sorted timestamps split wherever the gap exceeds
/// `gap_threshold`.
std::vector<CoverageInterval> split_coverage(std::span<const Trade> sorted,
                                             double gap_threshold);

struct ActivityDay {
    std::int64_t day = 0;  // days since 1970-01-01 UTC
    std::uint64_t trade_count = 0;
    double usd_volume = 0.0;
    /// Mean trade_count over this and up to 29 preceding entries.
    double ma30_count = 0.0;
};

/// One entry per UTC day intersecting coverage; covered days without trades
/// have zero counts, uncovered days are omitted.
std::vector<ActivityDay> daily_activity(const ExchangeDataset& dataset);

}  // namespace cryptotail
