#pragma once

#include "cryptotail/fixture.hpp"
#include "cryptotail/market_data.hpp"
#include "cryptotail/studies.hpp"
#include "cryptotail/tail.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cryptotail::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericError = 3 };

struct InputSpec {
    std::string exchange_id;
    std::filesystem::path path;
};

/// "exchange=path", or a bare path whose file stem (minus .csv/.gz) names the exchange.
InputSpec parse_input(const std::string& spec);

struct RunConfig {
    std::vector<InputSpec> inputs;
    std::vector<double> deltas;  // empty: the command's default grid
    std::vector<Estimator> estimators{Estimator::hill, Estimator::regression};
    std::vector<Side> sides{Side::positive, Side::negative};
    std::size_t replicates = 1000;
    double confidence = 0.95;
    std::uint64_t master_seed = 0;
    std::size_t n_min = 50;
    std::size_t max_candidates = 2000;
    double gap_threshold = 86400.0;
    std::filesystem::path output_dir = "out";
    bool drop_zero_returns = false;
    bool refit_xmin = false;
    std::size_t bonferroni_m = 0;  // 0: no adjustment column
    bool strict_ingest = false;
    bool with_replicates = false;
    /// Per-exchange sweep table covers deltas up to this; larger deltas only aggregate.
    double table_max_delta = 600.0;
    double window_delta = 300.0;
    int window_start_year = 2010;
    unsigned window_start_month = 8;
    int window_count = 15;
    /// Parallelism. Not part of the config hash: results never depend on it.
    unsigned threads = 1;
};

/// Sorted `key=value` lines of every result-affecting field.
std::string canonical_config(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);
std::string hex64(std::uint64_t v);

FitOptions fit_options(const RunConfig& config);
GofOptions gof_options(const RunConfig& config);

/// Ingests every input (concurrently when threads > 1), in input order.
std::vector<ExchangeDataset> load_datasets(const RunConfig& config);

struct CommandResult {
    int exit_code = kOk;
    std::vector<std::filesystem::path> outputs;
    std::string summary;
};

CommandResult cmd_ingest(const RunConfig& config);
CommandResult cmd_fit(const RunConfig& config);
CommandResult cmd_gof(const RunConfig& config);
CommandResult cmd_sweep(const RunConfig& config);
CommandResult cmd_windows(const RunConfig& config);
CommandResult cmd_ccdf(const RunConfig& config);
/// Writes the fixture to `output` (gzip when it ends in .gz).
CommandResult cmd_fixture(const RunConfig& config, const FixtureOptions& fixture,
                          const std::filesystem::path& output);

/// Fit (and optionally GoF) cells for every (exchange, delta, side, estimator).
std::vector<SweepCell> fit_cells(const RunConfig& config, const std::vector<ExchangeDataset>& datasets,
                                 bool run_gof);

/// Full command-line entry point. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cryptotail::cli
