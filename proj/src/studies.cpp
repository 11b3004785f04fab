#include "cryptotail/studies.hpp"

#include "cryptotail/calendar.hpp"
#include "cryptotail/error.hpp"
#include "cryptotail/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace cryptotail {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

struct SeriesSlot {
    std::string exchange_id;
    double delta_t = 0.0;
    std::optional<ReturnSeries> returns;
    std::string error;
};

std::string cell_key(const std::string& exchange, double delta_t, Side side, Estimator est) {
    return exchange + "|" + std::to_string(static_cast<long long>(std::llround(delta_t * 1000.0))) + "|" +
           std::string(to_string(side)) + "|" + std::string(to_string(est));
}

FitOptions single_threaded(FitOptions f) {
    f.threads = 1;
    return f;
}

GofOptions single_threaded(GofOptions g) {
    g.threads = 1;
    g.fit.threads = 1;
    return g;
}

}  // namespace

std::vector<SweepCell> sweep(std::span<const ExchangeDataset> datasets, const SweepOptions& options) {
    if (datasets.empty()) throw DataError("sweep: no datasets");

    std::vector<SeriesSlot> slots;
    for (double dt : options.deltas) {
        std::vector<ReturnSeries> parts;
        std::string last_error;
        for (const auto& ds : datasets) {
            SeriesSlot slot{ds.exchange_id(), dt, std::nullopt, {}};
            try {
                slot.returns = standardized_returns(ds, dt, options.drop_zero_returns);
            } catch (const DataError& e) {
                slot.error = e.what();
                last_error = slot.error;
            }
            if (options.aggregate) {
                if (slot.returns) parts.push_back(std::move(*slot.returns));
            } else {
                slots.push_back(std::move(slot));
            }
        }
        if (options.aggregate) {
            SeriesSlot agg{"aggregate", dt, std::nullopt, {}};
            if (parts.empty()) {
                agg.error = "no exchange produced returns: " + last_error;
            } else {
                agg.returns = pool_returns(parts);
            }
            slots.push_back(std::move(agg));
        }
    }

    struct Job {
        std::size_t slot;
        SweepCell cell;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < slots.size(); ++s) {
        for (Side side : options.sides) {
            for (Estimator est : options.estimators) {
                SweepCell cell;
                cell.exchange_id = slots[s].exchange_id;
                cell.delta_t = slots[s].delta_t;
                cell.side = side;
                cell.estimator = est;
                jobs.push_back({s, std::move(cell)});
            }
        }
    }
    std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
        return std::tie(a.cell.exchange_id, a.cell.delta_t, a.cell.side, a.cell.estimator) <
               std::tie(b.cell.exchange_id, b.cell.delta_t, b.cell.side, b.cell.estimator);
    });

    // Few cells: spend the workers inside each cell instead.
    const bool inner = jobs.size() < resolve_threads(options.threads);
    FitOptions fit_opts = single_threaded(options.fit);
    GofOptions gof_opts = single_threaded(options.gof);
    if (inner) {
        fit_opts.threads = options.threads;
        gof_opts.threads = options.threads;
        gof_opts.fit.threads = options.threads;
    }
    parallel_for(jobs.size(), inner ? 1U : options.threads, [&](std::size_t j) {
        SweepCell& cell = jobs[j].cell;
        const SeriesSlot& slot = slots[jobs[j].slot];
        if (!slot.returns) {
            cell.error = slot.error;
            return;
        }
        cell.return_count = slot.returns->size();
        try {
            const TailSample tail = make_tail(*slot.returns, cell.side);
            cell.fit = select_xmin(tail, cell.estimator, fit_opts);
            if (options.run_gof) {
                const auto policy =
                    options.seeds.child(fnv1a64(cell_key(cell.exchange_id, cell.delta_t, cell.side, cell.estimator)));
                cell.gof = gof_test(tail, *cell.fit, gof_opts, policy);
                cell.pl_plausible = cell.gof->plausible();
            }
        } catch (const Error& e) {
            cell.error = e.what();
        }
    });

    std::vector<SweepCell> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) out.push_back(std::move(j.cell));
    return out;
}

std::optional<double> mean_daily_volume(std::span<const ActivityDay> activity, const HalfYearWindow& window) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& d : activity) {
        if (window.contains(static_cast<double>(d.day) * kSecondsPerDay)) {
            sum += d.usd_volume;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

namespace {

/// Raw returns per exchange split into the study windows; exchanges without
/// usable bars are left out.
std::vector<std::vector<WindowSlice>> split_all(std::span<const ExchangeDataset> datasets,
                                                const StudyOptions& options) {
    std::vector<std::vector<WindowSlice>> out;
    for (const auto& ds : datasets) {
        try {
            const auto raw = log_returns(resample_bars(ds, options.delta_t), options.drop_zero_returns);
            out.push_back(window_split(raw, options.windows));
        } catch (const DataError&) {
            out.emplace_back();
        }
    }
    return out;
}

}  // namespace

TemporalStudyResult temporal_study(std::span<const ExchangeDataset> datasets, const StudyOptions& options) {
    if (datasets.empty()) throw DataError("temporal study: no datasets");
    const auto per_exchange = split_all(datasets, options);

    TemporalStudyResult result;
    std::vector<ReturnSeries> pooled(options.windows.size());
    for (std::size_t w = 0; w < options.windows.size(); ++w) {
        std::vector<ReturnSeries> parts;
        for (const auto& slices : per_exchange) {
            if (!slices.empty() && slices[w].standardized) parts.push_back(slices[w].returns);
        }
        pooled[w] = pool_returns(parts);
        pooled[w].window_id = options.windows[w].index;
        for (Side side : {Side::positive, Side::negative}) {
            WindowFit wf;
            wf.window = options.windows[w];
            wf.side = side;
            wf.return_count = pooled[w].size();
            result.windows.push_back(std::move(wf));
        }
    }

    const FitOptions fit_opts = single_threaded(options.fit);
    const GofOptions gof_opts = single_threaded(options.gof);
    parallel_for(result.windows.size(), options.threads, [&](std::size_t j) {
        WindowFit& wf = result.windows[j];
        const ReturnSeries& series = pooled[j / 2];
        if (series.values.empty()) {
            wf.note = "empty window";
            return;
        }
        try {
            const TailSample tail = make_tail(series, wf.side);
            wf.fit = select_xmin(tail, options.estimator, fit_opts);
            if (options.run_gof) {
                const auto key = "temporal|" + std::to_string(wf.window.index) + "|" +
                                 std::string(to_string(wf.side));
                wf.gof = gof_test(tail, *wf.fit, gof_opts, options.seeds.child(fnv1a64(key)));
            }
        } catch (const DataError& e) {
            wf.note = e.what();
        }
    });

    std::vector<double> p_values;
    for (Side side : {Side::positive, Side::negative}) {
        std::vector<double> t;
        std::vector<double> a;
        for (const auto& wf : result.windows) {
            if (wf.side != side || !wf.fit) continue;
            t.push_back(static_cast<double>(wf.window.index));
            a.push_back(wf.fit->alpha);
            if (wf.gof) p_values.push_back(wf.gof->p_value);
        }
        if (t.size() < 3) {
            throw DataError("insufficient windows: " + std::string(to_string(side)) + " tail has " +
                            std::to_string(t.size()) + " fitted windows, need 3");
        }
        (side == Side::positive ? result.positive : result.negative) = ols_fit(t, a);
    }

    result.gof_tests = p_values.size();
    if (!p_values.empty()) {
        const double level = 1.0 - options.gof.confidence;
        result.plausible_unadjusted = static_cast<std::size_t>(
            std::count_if(p_values.begin(), p_values.end(), [&](double p) { return p >= level; }));
        const auto adj = bonferroni_adjust(p_values, p_values.size(), options.gof.confidence);
        result.plausible_bonferroni =
            static_cast<std::size_t>(std::count(adj.reject.begin(), adj.reject.end(), false));
    }
    return result;
}

LiquidityStudyResult liquidity_study(std::span<const ExchangeDataset> datasets, const StudyOptions& options) {
    if (datasets.empty()) throw DataError("liquidity study: no datasets");
    const auto per_exchange = split_all(datasets, options);

    struct Job {
        std::size_t exchange;
        std::size_t window;
        Side side;
        double volume;
        std::optional<TailFit> fit;
    };
    std::vector<Job> jobs;
    for (std::size_t e = 0; e < datasets.size(); ++e) {
        if (per_exchange[e].empty()) continue;
        const auto activity = daily_activity(datasets[e]);
        for (std::size_t w = 0; w < options.windows.size(); ++w) {
            const auto& slice = per_exchange[e][w];
            if (!slice.standardized) continue;
            const auto volume = mean_daily_volume(activity, options.windows[w]);
            if (!volume) continue;
            for (Side side : {Side::positive, Side::negative}) jobs.push_back({e, w, side, *volume, std::nullopt});
        }
    }

    const FitOptions fit_opts = single_threaded(options.fit);
    parallel_for(jobs.size(), options.threads, [&](std::size_t j) {
        Job& job = jobs[j];
        try {
            job.fit = select_xmin(make_tail(per_exchange[job.exchange][job.window].returns, job.side),
                                  options.estimator, fit_opts);
        } catch (const DataError&) {
        }
    });

    LiquidityStudyResult result;
    for (const auto& job : jobs) {
        if (!job.fit) {
            ++(job.side == Side::positive ? result.dropped_positive : result.dropped_negative);
            continue;
        }
        result.cells.push_back({datasets[job.exchange].exchange_id(), options.windows[job.window], job.side,
                                *job.fit, job.volume});
    }
    for (Side side : {Side::positive, Side::negative}) {
        std::vector<double> volume;
        std::vector<double> alpha;
        for (const auto& c : result.cells) {
            if (c.side != side) continue;
            volume.push_back(c.mean_daily_usd_volume);
            alpha.push_back(c.fit.alpha);
        }
        if (volume.size() < 3) {
            throw DataError("insufficient cells: " + std::string(to_string(side)) + " tail has " +
                            std::to_string(volume.size()) + " valid cells, need 3");
        }
        (side == Side::positive ? result.positive : result.negative) = pearson_test(volume, alpha);
    }
    return result;
}

}  // namespace cryptotail
