#include "cryptotail/cli.hpp"

#include "cryptotail/calendar.hpp"
#include "cryptotail/error.hpp"
#include "cryptotail/gof.hpp"
#include "cryptotail/parallel.hpp"
#include "cryptotail/records.hpp"
#include "cryptotail/returns.hpp"
#include "cryptotail/scalar_stats.hpp"

#include <CLI11.hpp>
#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace cryptotail::cli {

namespace fs = std::filesystem;

InputSpec parse_input(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq != std::string::npos && eq > 0) return {spec.substr(0, eq), fs::path(spec.substr(eq + 1))};
    fs::path p(spec);
    fs::path stem = p.filename();
    while (stem.has_extension() && (stem.extension() == ".gz" || stem.extension() == ".csv")) {
        stem = stem.stem();
    }
    return {stem.string(), p};
}

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& v, auto&& f) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += f(v[i]);
    }
    return s;
}

std::vector<double> deltas_or(const RunConfig& c, std::vector<double> fallback) {
    return c.deltas.empty() ? std::move(fallback) : c.deltas;
}

const std::vector<double> kFitDefaultDeltas{60.0};

std::vector<HalfYearWindow> windows_of(const RunConfig& c) {
    return half_year_windows(c.window_start_year, c.window_start_month, c.window_count);
}

std::string run_banner(const RunConfig& c, std::string_view command) {
    return "cryptotail " + std::string(command) + " config_hash=" + hex64(config_hash(c)) +
           " master_seed=" + std::to_string(c.master_seed);
}

nlohmann::json run_record(const RunConfig& c, std::string_view command) {
    return {{"record", "run"},
            {"command", command},
            {"config_hash", hex64(config_hash(c))},
            {"master_seed", c.master_seed},
            {"config", canonical_config(c)}};
}

fs::path prepare_output(const RunConfig& c, const std::string& name) {
    fs::create_directories(c.output_dir);
    return c.output_dir / name;
}

class OutFile {
public:
    explicit OutFile(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw Error("cannot write " + path.string());
    }
    std::ofstream& stream() { return out_; }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
    std::ofstream out_;
};

void write_jsonl(const fs::path& path, const nlohmann::json& header, const std::vector<nlohmann::json>& records) {
    OutFile f(path);
    f.stream() << header.dump() << '\n';
    for (const auto& r : records) f.stream() << r.dump() << '\n';
}

/// Streambuf that gzip-compresses into a gzFile.
class GzStreamBuf : public std::streambuf {
public:
    explicit GzStreamBuf(const fs::path& path) : file_(gzopen(path.c_str(), "wb9")) {
        if (file_ == nullptr) throw Error("cannot write " + path.string());
    }
    ~GzStreamBuf() override {
        if (file_ != nullptr) gzclose(file_);
    }
    GzStreamBuf(const GzStreamBuf&) = delete;
    GzStreamBuf& operator=(const GzStreamBuf&) = delete;

protected:
    std::streamsize xsputn(const char* s, std::streamsize n) override {
        return gzwrite(file_, s, static_cast<unsigned>(n)) == static_cast<int>(n) ? n : 0;
    }
    int_type overflow(int_type ch) override {
        if (ch == traits_type::eof()) return traits_type::not_eof(ch);
        const char c = traits_type::to_char_type(ch);
        return gzwrite(file_, &c, 1) == 1 ? ch : traits_type::eof();
    }

private:
    gzFile file_;
};

std::string cell_name(const std::string& exchange, double dt, Side side) {
    return exchange + "_" + fmt(dt) + "s_" + std::string(to_string(side));
}

}  // namespace

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string canonical_config(const RunConfig& c) {
    std::map<std::string, std::string> kv;
    kv["inputs"] = join(c.inputs, [](const InputSpec& i) { return i.exchange_id + "=" + i.path.string(); });
    kv["deltas"] = join(c.deltas, [](double d) { return fmt(d); });
    kv["estimators"] = join(c.estimators, [](Estimator e) { return std::string(to_string(e)); });
    kv["sides"] = join(c.sides, [](Side s) { return std::string(to_string(s)); });
    kv["replicates"] = std::to_string(c.replicates);
    kv["confidence"] = fmt(c.confidence);
    kv["master_seed"] = std::to_string(c.master_seed);
    kv["n_min"] = std::to_string(c.n_min);
    kv["max_candidates"] = std::to_string(c.max_candidates);
    kv["gap_threshold"] = fmt(c.gap_threshold);
    kv["drop_zero_returns"] = c.drop_zero_returns ? "true" : "false";
    kv["refit_xmin"] = c.refit_xmin ? "true" : "false";
    kv["bonferroni_m"] = std::to_string(c.bonferroni_m);
    kv["strict_ingest"] = c.strict_ingest ? "true" : "false";
    kv["with_replicates"] = c.with_replicates ? "true" : "false";
    kv["table_max_delta"] = fmt(c.table_max_delta);
    kv["window_delta"] = fmt(c.window_delta);
    kv["window_start"] = std::to_string(c.window_start_year) + "-" + std::to_string(c.window_start_month);
    kv["window_count"] = std::to_string(c.window_count);
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t config_hash(const RunConfig& c) { return fnv1a64(canonical_config(c)); }

FitOptions fit_options(const RunConfig& c) {
    FitOptions f;
    f.n_min = c.n_min;
    f.max_candidates = c.max_candidates;
    f.threads = c.threads;
    return f;
}

GofOptions gof_options(const RunConfig& c) {
    GofOptions g;
    g.replicates = c.replicates;
    g.confidence = c.confidence;
    g.refit_xmin = c.refit_xmin;
    g.fit = fit_options(c);
    g.threads = c.threads;
    return g;
}

std::vector<ExchangeDataset> load_datasets(const RunConfig& c) {
    if (c.inputs.empty()) throw Error("no --input given");
    for (const auto& in : c.inputs) {
        if (!fs::exists(in.path)) throw Error("input not found: " + in.path.string());
    }
    IngestOptions opts;
    opts.gap_threshold = c.gap_threshold;
    opts.strict = c.strict_ingest;
    std::vector<std::optional<ExchangeDataset>> slots(c.inputs.size());
    parallel_for(c.inputs.size(), c.threads, [&](std::size_t i) {
        slots[i].emplace(ingest_file(c.inputs[i].path, c.inputs[i].exchange_id, opts));
    });
    std::vector<ExchangeDataset> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::vector<SweepCell> fit_cells(const RunConfig& c, const std::vector<ExchangeDataset>& datasets, bool run_gof) {
    SweepOptions so;
    so.deltas = deltas_or(c, kFitDefaultDeltas);
    so.estimators = c.estimators;
    so.sides = c.sides;
    so.run_gof = run_gof;
    so.drop_zero_returns = c.drop_zero_returns;
    so.fit = fit_options(c);
    so.gof = gof_options(c);
    so.threads = c.threads;
    so.seeds = SeedPolicy{c.master_seed};
    return sweep(datasets, so);
}

namespace {

std::vector<SweepCell> sweep_cells(const RunConfig& c, const std::vector<ExchangeDataset>& datasets,
                                   std::vector<double> deltas, bool aggregate) {
    SweepOptions so;
    so.deltas = std::move(deltas);
    so.estimators = c.estimators;
    so.sides = c.sides;
    so.aggregate = aggregate;
    so.run_gof = true;
    so.drop_zero_returns = c.drop_zero_returns;
    so.fit = fit_options(c);
    so.gof = gof_options(c);
    so.threads = c.threads;
    so.seeds = SeedPolicy{c.master_seed};
    return sweep(datasets, so);
}

std::vector<bool> bonferroni_flags(const RunConfig& c, const std::vector<SweepCell>& cells) {
    std::vector<double> p;
    for (const auto& cell : cells) p.push_back(cell.gof ? cell.gof->p_value : 1.0);
    return bonferroni_adjust(p, std::max<std::size_t>(c.bonferroni_m, 1), c.confidence).reject;
}

std::vector<nlohmann::json> cell_records(const RunConfig& c, const std::vector<SweepCell>& cells) {
    std::vector<nlohmann::json> records;
    const auto bonf = c.bonferroni_m > 0 ? bonferroni_flags(c, cells) : std::vector<bool>{};
    for (std::size_t i = 0; i < cells.size(); ++i) {
        auto j = to_json(cells[i], c.with_replicates);
        j["record"] = cells[i].gof ? "gof" : "fit";
        j["config_hash"] = hex64(config_hash(c));
        if (c.bonferroni_m > 0 && cells[i].gof) {
            j["bonferroni_m"] = c.bonferroni_m;
            j["reject_bonferroni"] = static_cast<bool>(bonf[i]);
        }
        records.push_back(std::move(j));
    }
    return records;
}

std::string summarize(const std::vector<SweepCell>& cells) {
    std::ostringstream s;
    for (const auto& cell : cells) {
        s << cell.exchange_id << " dt=" << fmt(cell.delta_t) << "s " << to_string(cell.side) << ' '
          << to_string(cell.estimator) << ": ";
        if (!cell.ok()) {
            s << "error: " << cell.error << '\n';
            continue;
        }
        s << "alpha=" << fmt(cell.fit->alpha);
        if (std::isfinite(cell.fit->std_error)) s << " +- " << fmt(cell.fit->std_error);
        s << " xmin=" << fmt(cell.fit->xmin) << " n=" << cell.fit->n << " D=" << fmt(cell.fit->ks);
        if (cell.gof) s << " p=" << fmt(cell.gof->p_value) << (cell.pl_plausible ? " (plausible)" : " (rejected)");
        s << '\n';
    }
    return s.str();
}

int cells_exit_code(const std::vector<SweepCell>& cells) {
    const bool any_ok = std::any_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.ok(); });
    return any_ok ? kOk : kDataError;
}

}  // namespace

CommandResult cmd_ingest(const RunConfig& c) {
    const auto datasets = load_datasets(c);
    CommandResult res;
    std::vector<nlohmann::json> records;
    std::ostringstream summary;
    for (const auto& ds : datasets) {
        auto j = to_json(ds);
        j["config_hash"] = hex64(config_hash(c));
        records.push_back(std::move(j));
        summary << ds.exchange_id() << ": accepted=" << ds.report().accepted
                << " rejected=" << ds.report().rejected << " intervals=" << ds.coverage().size() << '\n';

        const auto path = prepare_output(c, "activity_" + ds.exchange_id() + ".csv");
        OutFile f(path);
        f.stream() << "# " << run_banner(c, "ingest") << '\n' << "day,trade_count,usd_volume,ma30_count\n";
        for (const auto& d : daily_activity(ds)) {
            f.stream() << iso_date(d.day) << ',' << d.trade_count << ',' << fmt(d.usd_volume) << ','
                       << fmt(d.ma30_count) << '\n';
        }
        res.outputs.push_back(path);
    }
    const auto path = prepare_output(c, "ingest.jsonl");
    write_jsonl(path, run_record(c, "ingest"), records);
    res.outputs.insert(res.outputs.begin(), path);
    res.summary = summary.str();
    return res;
}

CommandResult cmd_fit(const RunConfig& c) {
    const auto cells = fit_cells(c, load_datasets(c), false);
    CommandResult res;
    const auto path = prepare_output(c, "fits.jsonl");
    write_jsonl(path, run_record(c, "fit"), cell_records(c, cells));
    res.outputs.push_back(path);
    res.summary = summarize(cells);
    res.exit_code = cells_exit_code(cells);
    return res;
}

CommandResult cmd_gof(const RunConfig& c) {
    const auto cells = fit_cells(c, load_datasets(c), true);
    CommandResult res;
    const auto path = prepare_output(c, "gof.jsonl");
    write_jsonl(path, run_record(c, "gof"), cell_records(c, cells));
    res.outputs.push_back(path);
    res.summary = summarize(cells);
    res.exit_code = cells_exit_code(cells);
    return res;
}

CommandResult cmd_sweep(const RunConfig& c) {
    const auto datasets = load_datasets(c);
    const auto deltas = deltas_or(c, kDefaultDeltas);
    std::vector<double> table_deltas;
    std::copy_if(deltas.begin(), deltas.end(), std::back_inserter(table_deltas),
                 [&](double d) { return d <= c.table_max_delta; });

    const auto table = table_deltas.empty() ? std::vector<SweepCell>{}
                                            : sweep_cells(c, datasets, table_deltas, false);
    const auto points = sweep_cells(c, datasets, deltas, true);

    CommandResult res;
    {
        const auto path = prepare_output(c, "sweep_table.csv");
        OutFile f(path);
        f.stream() << "# " << run_banner(c, "sweep") << '\n'
                   << "delta_t,estimator,side,exchange,alpha,stderr,xmin,n,ks,p_value,pl_plausible,error\n";
        for (const auto& cell : table) {
            f.stream() << fmt(cell.delta_t) << ',' << to_string(cell.estimator) << ',' << to_string(cell.side)
                       << ',' << cell.exchange_id << ',';
            if (cell.fit) {
                f.stream() << fmt(cell.fit->alpha) << ',' << fmt(cell.fit->std_error) << ','
                           << fmt(cell.fit->xmin) << ',' << cell.fit->n << ',' << fmt(cell.fit->ks) << ',';
            } else {
                f.stream() << ",,,,,";
            }
            f.stream() << (cell.gof ? fmt(cell.gof->p_value) : "") << ','
                       << (cell.gof ? (cell.pl_plausible ? "1" : "0") : "") << ",\"" << cell.error << "\"\n";
        }
        res.outputs.push_back(path);
    }
    {
        const auto path = prepare_output(c, "sweep_points.csv");
        OutFile f(path);
        f.stream() << "# " << run_banner(c, "sweep") << '\n'
                   << "delta_t,side,estimator,alpha,err_low,err_high,p_value,pl_plausible\n";
        for (const auto& cell : points) {
            if (!cell.fit) continue;
            const double e = std::isfinite(cell.fit->std_error) ? cell.fit->std_error : 0.0;
            f.stream() << fmt(cell.delta_t) << ',' << to_string(cell.side) << ',' << to_string(cell.estimator)
                       << ',' << fmt(cell.fit->alpha) << ',' << fmt(cell.fit->alpha - e) << ','
                       << fmt(cell.fit->alpha + e) << ',' << (cell.gof ? fmt(cell.gof->p_value) : "") << ','
                       << (cell.pl_plausible ? 1 : 0) << '\n';
        }
        res.outputs.push_back(path);
    }
    {
        auto records = cell_records(c, table);
        auto agg = cell_records(c, points);
        records.insert(records.end(), agg.begin(), agg.end());
        const auto path = prepare_output(c, "sweep.jsonl");
        write_jsonl(path, run_record(c, "sweep"), records);
        res.outputs.push_back(path);
    }
    res.summary = summarize(table) + summarize(points);
    return res;
}

CommandResult cmd_windows(const RunConfig& c) {
    const auto datasets = load_datasets(c);
    StudyOptions so;
    so.delta_t = c.window_delta;
    so.windows = windows_of(c);
    so.estimator = c.estimators.empty() ? Estimator::hill : c.estimators.front();
    so.drop_zero_returns = c.drop_zero_returns;
    so.fit = fit_options(c);
    so.gof = gof_options(c);
    so.threads = c.threads;
    so.seeds = SeedPolicy{c.master_seed};

    CommandResult res;
    std::vector<nlohmann::json> records;
    std::ostringstream summary;
    std::optional<TemporalStudyResult> temporal;
    std::optional<LiquidityStudyResult> liquidity;
    try {
        temporal = temporal_study(datasets, so);
    } catch (const DataError& e) {
        records.push_back({{"record", "temporal_error"}, {"error", e.what()}});
        summary << "temporal study: " << e.what() << '\n';
    }
    try {
        liquidity = liquidity_study(datasets, so);
    } catch (const DataError& e) {
        records.push_back({{"record", "liquidity_error"}, {"error", e.what()}});
        summary << "liquidity study: " << e.what() << '\n';
    }

    if (temporal) {
        for (const auto& w : temporal->windows) {
            auto j = to_json(w);
            j["record"] = "window";
            records.push_back(std::move(j));
        }
        for (Side side : {Side::positive, Side::negative}) {
            auto j = to_json(temporal->regression(side));
            j["record"] = "temporal_regression";
            j["side"] = to_string(side);
            records.push_back(std::move(j));
        }
        const std::size_t m = c.bonferroni_m > 0 ? c.bonferroni_m : temporal->gof_tests;
        records.push_back({{"record", "window_gof_summary"},
                           {"tests", temporal->gof_tests},
                           {"plausible_unadjusted", temporal->plausible_unadjusted},
                           {"plausible_bonferroni", temporal->plausible_bonferroni},
                           {"bonferroni_m", m}});

        const auto path = prepare_output(c, "temporal_regression.csv");
        OutFile f(path);
        const auto& p = temporal->positive;
        const auto& n = temporal->negative;
        f.stream() << "# " << run_banner(c, "windows") << '\n'
                   << "row,positive_beta0,positive_beta1,negative_beta0,negative_beta1\n"
                   << "estimate," << fmt(p.beta0) << ',' << fmt(p.beta1) << ',' << fmt(n.beta0) << ','
                   << fmt(n.beta1) << '\n'
                   << "p_value," << fmt(p.p0) << ',' << fmt(p.p1) << ',' << fmt(n.p0) << ',' << fmt(n.p1) << '\n'
                   << "t_stat," << fmt(p.t0) << ',' << fmt(p.t1) << ',' << fmt(n.t0) << ',' << fmt(n.t1) << '\n'
                   << "T," << p.n << ',' << p.n << ',' << n.n << ',' << n.n << '\n';
        res.outputs.push_back(path);
        summary << "temporal: positive beta0=" << fmt(p.beta0) << " (p=" << fmt(p.p0) << ") beta1=" << fmt(p.beta1)
                << " (p=" << fmt(p.p1) << "); negative beta0=" << fmt(n.beta0) << " (p=" << fmt(n.p0)
                << ") beta1=" << fmt(n.beta1) << " (p=" << fmt(n.p1) << ")\n"
                << "window gof: " << temporal->plausible_unadjusted << "/" << temporal->gof_tests
                << " plausible unadjusted, " << temporal->plausible_bonferroni << "/" << temporal->gof_tests
                << " after Bonferroni\n";
    }
    if (liquidity) {
        for (const auto& cell : liquidity->cells) {
            auto j = to_json(cell);
            j["record"] = "liquidity_cell";
            records.push_back(std::move(j));
        }
        for (Side side : {Side::positive, Side::negative}) {
            auto j = to_json(liquidity->correlation(side));
            j["record"] = "liquidity_correlation";
            j["side"] = to_string(side);
            j["dropped_cells"] = side == Side::positive ? liquidity->dropped_positive : liquidity->dropped_negative;
            records.push_back(std::move(j));
        }
        const auto path = prepare_output(c, "liquidity.csv");
        OutFile f(path);
        f.stream() << "# " << run_banner(c, "windows") << '\n'
                   << "exchange,window,side,alpha,stderr,xmin,n,mean_daily_usd_volume\n";
        for (const auto& cell : liquidity->cells) {
            f.stream() << cell.exchange_id << ',' << cell.window.index << ',' << to_string(cell.side) << ','
                       << fmt(cell.fit.alpha) << ',' << fmt(cell.fit.std_error) << ',' << fmt(cell.fit.xmin) << ','
                       << cell.fit.n << ',' << fmt(cell.mean_daily_usd_volume) << '\n';
        }
        res.outputs.push_back(path);
        summary << "liquidity: positive r=" << fmt(liquidity->positive.r) << " (p=" << fmt(liquidity->positive.p_value)
                << "), negative r=" << fmt(liquidity->negative.r) << " (p=" << fmt(liquidity->negative.p_value)
                << "), cells=" << liquidity->cells.size() << '\n';
    }

    const auto path = prepare_output(c, "windows.jsonl");
    write_jsonl(path, run_record(c, "windows"), records);
    res.outputs.insert(res.outputs.begin(), path);
    res.summary = summary.str();
    res.exit_code = (temporal || liquidity) ? kOk : kDataError;
    return res;
}

CommandResult cmd_ccdf(const RunConfig& c) {
    const auto datasets = load_datasets(c);
    const auto deltas = deltas_or(c, kFitDefaultDeltas);
    CommandResult res;
    std::ostringstream summary;
    const auto banner = run_banner(c, "ccdf");
    bool any = false;
    for (const auto& ds : datasets) {
        for (double dt : deltas) {
            ReturnSeries returns;
            try {
                returns = standardized_returns(ds, dt, c.drop_zero_returns);
            } catch (const DataError& e) {
                summary << ds.exchange_id() << " dt=" << fmt(dt) << ": " << e.what() << '\n';
                continue;
            }
            for (Side side : c.sides) {
                const TailSample tail = make_tail(returns, side);
                if (tail.values.empty()) continue;
                any = true;
                const auto name = cell_name(ds.exchange_id(), dt, side);
                const auto points = empirical_ccdf(tail);
                // Tail probabilities relative to the whole return series.
                const double share = static_cast<double>(tail.size()) / static_cast<double>(returns.size());
                {
                    const auto path = prepare_output(c, "ccdf_" + name + "_empirical.txt");
                    OutFile f(path);
                    f.stream() << "# " << banner << "\n# x P(|R|>x, side) for standardized returns\n";
                    for (std::size_t i = 0; i < points.size(); ++i) {
                        if (points.ccdf[i] > 0.0) f.stream() << fmt(points.x[i]) << ' ' << fmt(points.ccdf[i] * share) << '\n';
                    }
                    res.outputs.push_back(path);
                }
                {
                    const auto path = prepare_output(c, "ccdf_" + name + "_normal.txt");
                    OutFile f(path);
                    f.stream() << "# " << banner << "\n# x 1-Phi(x) standard normal reference\n";
                    for (std::size_t i = 0; i < points.size(); ++i) {
                        f.stream() << fmt(points.x[i]) << ' ' << fmt(points.normal_ccdf[i]) << '\n';
                    }
                    res.outputs.push_back(path);
                }
                for (Estimator est : c.estimators) {
                    TailFit fit;
                    try {
                        fit = select_xmin(tail, est, fit_options(c));
                    } catch (const DataError& e) {
                        summary << name << ' ' << to_string(est) << ": " << e.what() << '\n';
                        continue;
                    }
                    const auto path = prepare_output(c, "ccdf_" + name + "_powerlaw_" + std::string(to_string(est)) + ".txt");
                    OutFile f(path);
                    const double level = share * static_cast<double>(fit.n) / static_cast<double>(tail.size());
                    f.stream() << "# " << banner << "\n# x fitted power law, alpha=" << fmt(fit.alpha)
                               << " xmin=" << fmt(fit.xmin) << " n=" << fit.n << '\n';
                    for (double x : points.x) {
                        if (x >= fit.xmin) f.stream() << fmt(x) << ' ' << fmt(level * std::pow(x / fit.xmin, -fit.alpha)) << '\n';
                    }
                    res.outputs.push_back(path);
                    summary << name << ' ' << to_string(est) << ": alpha=" << fmt(fit.alpha) << " xmin=" << fmt(fit.xmin)
                            << '\n';
                }
            }
        }
    }
    res.summary = summary.str();
    res.exit_code = any ? kOk : kDataError;
    return res;
}

CommandResult cmd_fixture(const RunConfig& c, const FixtureOptions& fx, const fs::path& output) {
    validate(fx);
    RunConfig keyed = c;
    keyed.master_seed = fx.seed;
    std::ostringstream params;
    params << "alpha=" << fmt(fx.alpha) << " xmin=" << fmt(fx.xmin) << " n=" << fx.n << " seed=" << fx.seed
           << " body=" << to_string(fx.body) << " tail_fraction=" << fmt(fx.tail_fraction)
           << " bar_seconds=" << fmt(fx.delta_t) << " scale=" << fmt(fx.scale) << " trades_per_bar="
           << fx.min_trades_per_bar << "-" << fx.max_trades_per_bar;
    const std::string fixture_hash = hex64(fnv1a64(params.str()));
    const std::vector<std::string> preamble{"cryptotail fixture config_hash=" + fixture_hash +
                                                " master_seed=" + std::to_string(fx.seed),
                                            params.str()};
    if (output.has_parent_path()) fs::create_directories(output.parent_path());
    std::size_t rows = 0;
    if (output.extension() == ".gz") {
        GzStreamBuf buf(output);
        std::ostream os(&buf);
        rows = write_fixture_csv(os, fx, preamble);
    } else {
        OutFile f(output);
        rows = write_fixture_csv(f.stream(), fx, preamble);
    }
    CommandResult res;
    res.outputs.push_back(output);
    res.summary = "wrote " + std::to_string(rows) + " trades to " + output.string() + "\n";
    return res;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Heavy-tail analysis of trade-level cryptocurrency data"};
    app.set_config("--config", "", "Flat key=value configuration file; command-line flags override it");
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    RunConfig cfg;
    std::vector<std::string> inputs;
    std::vector<std::string> estimators;
    std::vector<std::string> sides;
    std::string window_start = "2010-08";

    app.add_option("-i,--input", inputs, "Trade CSV per exchange as exchange=path (plain or .gz)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->delimiter(',');
    app.add_option("--delta-t", cfg.deltas, "Bar intervals in seconds")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->delimiter(',');
    app.add_option("--estimator", estimators, "hill and/or regression")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->delimiter(',');
    app.add_option("--side", sides, "positive and/or negative")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->delimiter(',');
    app.add_option("-N,--replicates", cfg.replicates, "Synthetic datasets per GoF test")->capture_default_str();
    app.add_option("--confidence", cfg.confidence, "Confidence level of the GoF test")->capture_default_str();
    app.add_option("--seed", cfg.master_seed, "Master seed")->capture_default_str();
    app.add_option("--n-min", cfg.n_min, "Minimum tail points per fit")->capture_default_str();
    app.add_option("--max-candidates", cfg.max_candidates, "x_min candidate budget")->capture_default_str();
    app.add_option("--gap-threshold", cfg.gap_threshold, "Seconds of silence that split coverage")
        ->capture_default_str();
    app.add_option("-o,--output-dir", cfg.output_dir, "Output directory")->capture_default_str();
    app.add_flag("--drop-zero-returns", cfg.drop_zero_returns, "Drop zero returns from carried-forward bars");
    app.add_flag("--refit-xmin", cfg.refit_xmin, "Re-select x_min on every GoF replicate");
    app.add_option("--bonferroni", cfg.bonferroni_m, "Report Bonferroni decisions for m tests");
    app.add_flag("--strict", cfg.strict_ingest, "Abort ingest on the first bad line");
    app.add_flag("--with-replicates", cfg.with_replicates, "Include every replicate distance in GoF records");
    app.add_option("--table-max-delta", cfg.table_max_delta, "Largest delta in the per-exchange sweep table")
        ->capture_default_str();
    app.add_option("--window-delta", cfg.window_delta, "Bar interval for the window studies")->capture_default_str();
    app.add_option("--window-start", window_start, "First window as YYYY-MM")->capture_default_str();
    app.add_option("--windows", cfg.window_count, "Number of six-month windows")->capture_default_str();
    app.add_option("-j,--threads", cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();

    auto* ingest = app.add_subcommand("ingest", "Parse inputs and write ingest reports and daily activity");
    auto* fit = app.add_subcommand("fit", "Fit tails per exchange, delta, side and estimator");
    auto* gof = app.add_subcommand("gof", "Fit tails and run the resampling goodness-of-fit test");
    auto* sweep_cmd = app.add_subcommand("sweep", "Per-exchange table and aggregate delta sweep");
    auto* windows = app.add_subcommand("windows", "Half-year temporal regression and liquidity correlation");
    auto* ccdf = app.add_subcommand("ccdf", "Empirical CCDF, fitted power law and normal reference");
    auto* fixture = app.add_subcommand("fixture", "Write a synthetic trade file with a known tail exponent");

    FixtureOptions fx;
    std::string body = "none";
    std::string fixture_out;
    std::vector<unsigned> trades_per_bar;
    fixture->add_option("--alpha", fx.alpha, "Tail exponent")->capture_default_str();
    fixture->add_option("--xmin", fx.xmin, "Tail threshold in units of --scale")->capture_default_str();
    fixture->add_option("-n,--n", fx.n, "Number of bar returns")->capture_default_str();
    fixture->add_option("--fixture-seed", fx.seed, "Seed (defaults to --seed)");
    fixture->add_option("--body", body, "none or gaussian")->capture_default_str();
    fixture->add_option("--tail-fraction", fx.tail_fraction, "Tail share with a gaussian body")->capture_default_str();
    fixture->add_option("--bar-seconds", fx.delta_t, "Bar interval the returns are encoded on")->capture_default_str();
    fixture->add_option("--scale", fx.scale, "Return scale")->capture_default_str();
    fixture->add_option("--trades-per-bar", trades_per_bar, "min,max trades per bar")->expected(2)->delimiter(',');
    fixture->add_option("--out", fixture_out, "Output CSV path (.gz for gzip)")->required();

    for (auto* sub : {ingest, fit, gof, sweep_cmd, windows, ccdf, fixture}) sub->fallthrough();

    std::vector<const char*> argv{"cryptotail"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        for (const auto& s : inputs) cfg.inputs.push_back(parse_input(s));
        if (!estimators.empty()) {
            cfg.estimators.clear();
            for (const auto& s : estimators) cfg.estimators.push_back(parse_estimator(s));
        }
        if (!sides.empty()) {
            cfg.sides.clear();
            for (const auto& s : sides) cfg.sides.push_back(parse_side(s));
        }
        int y = 0;
        unsigned m = 0;
        if (std::sscanf(window_start.c_str(), "%d-%u", &y, &m) != 2 || m < 1 || m > 12) {
            throw Error("--window-start must be YYYY-MM");
        }
        cfg.window_start_year = y;
        cfg.window_start_month = m;
        if (fixture->parsed()) {
            fx.body = parse_fixture_body(body);
            if (fixture->count("--fixture-seed") == 0) fx.seed = cfg.master_seed;
            if (trades_per_bar.size() == 2) {
                fx.min_trades_per_bar = trades_per_bar[0];
                fx.max_trades_per_bar = trades_per_bar[1];
            }
        }
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        CommandResult res;
        if (ingest->parsed()) res = cmd_ingest(cfg);
        if (fit->parsed()) res = cmd_fit(cfg);
        if (gof->parsed()) res = cmd_gof(cfg);
        if (sweep_cmd->parsed()) res = cmd_sweep(cfg);
        if (windows->parsed()) res = cmd_windows(cfg);
        if (ccdf->parsed()) res = cmd_ccdf(cfg);
        if (fixture->parsed()) res = cmd_fixture(cfg, fx, fixture_out);
        out << res.summary;
        for (const auto& p : res.outputs) out << "wrote " << p.string() << '\n';
        return res.exit_code;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumericError;
    } catch (const Error& e) {
        // Missing inputs and unwritable outputs are configuration problems.
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kNumericError;
    }
}

}  // namespace cryptotail::cli
