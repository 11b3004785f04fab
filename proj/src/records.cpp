#include "cryptotail/records.hpp"

#include "cryptotail/calendar.hpp"

#include <cmath>
#include <limits>

namespace cryptotail {

namespace {

nlohmann::json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

double number_or_nan(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

nlohmann::json to_json(const ExchangeDataset& dataset) {
    const auto& rep = dataset.report();
    nlohmann::json coverage = nlohmann::json::array();
    for (const auto& iv : dataset.coverage()) {
        coverage.push_back({{"start", iso_datetime(iv.start)},
                            {"end", iso_datetime(iv.end)},
                            {"trades", iv.trade_count()}});
    }
    nlohmann::json rejected = nlohmann::json::array();
    for (const auto& r : rep.rejected_samples) {
        rejected.push_back({{"line", r.line}, {"field", r.field}, {"reason", r.reason}});
    }
    return {{"record", "ingest"},
            {"exchange", dataset.exchange_id()},
            {"accepted", rep.accepted},
            {"rejected", rep.rejected},
            {"header_skipped", rep.header_skipped},
            {"coverage", coverage},
            {"rejected_samples", rejected}};
}

nlohmann::json to_json(const TailFit& fit) {
    return {{"estimator", to_string(fit.estimator)},
            {"side", to_string(fit.side)},
            {"alpha", number(fit.alpha)},
            {"xmin", number(fit.xmin)},
            {"n", fit.n},
            {"stderr", number(fit.std_error)},
            {"ks", number(fit.ks)}};
}

TailFit tail_fit_from_json(const nlohmann::json& j) {
    TailFit f;
    f.estimator = parse_estimator(j.at("estimator").get<std::string>());
    f.side = parse_side(j.at("side").get<std::string>());
    f.alpha = number_or_nan(j.at("alpha"));
    f.xmin = number_or_nan(j.at("xmin"));
    f.n = j.at("n").get<std::size_t>();
    f.std_error = number_or_nan(j.at("stderr"));
    f.ks = number_or_nan(j.at("ks"));
    return f;
}

nlohmann::json to_json(const GofResult& g, bool with_replicates) {
    nlohmann::json j{{"estimator", to_string(g.estimator)},
                     {"side", to_string(g.side)},
                     {"d_emp", number(g.d_emp)},
                     {"replicates", g.replicates},
                     {"p_value", number(g.p_value)},
                     {"master_seed", g.master_seed},
                     {"alpha_hat", number(g.alpha_hat)},
                     {"xmin", number(g.xmin)},
                     {"n", g.n},
                     {"confidence", g.confidence},
                     {"refit_xmin", g.refit_xmin},
                     {"redraws", g.redraws},
                     {"reject", g.reject()},
                     {"d_synthetic_summary",
                      {{"min", number(g.quantile(0.0))},
                       {"q05", number(g.quantile(0.05))},
                       {"median", number(g.quantile(0.5))},
                       {"q95", number(g.quantile(0.95))},
                       {"max", number(g.quantile(1.0))}}}};
    if (with_replicates) j["d_synthetic"] = g.d_synthetic;
    return j;
}

nlohmann::json to_json(const RegressionResult& r) {
    return {{"beta0", number(r.beta0)}, {"beta1", number(r.beta1)}, {"se0", number(r.se0)},
            {"se1", number(r.se1)},     {"t0", number(r.t0)},       {"t1", number(r.t1)},
            {"p0", number(r.p0)},       {"p1", number(r.p1)},       {"T", r.n},
            {"exact_fit", r.exact_fit}};
}

nlohmann::json to_json(const CorrelationResult& r) {
    return {{"r", number(r.r)}, {"n", r.n}, {"t_stat", number(r.t_stat)}, {"p_value", number(r.p_value)}};
}

nlohmann::json to_json(const SweepCell& cell, bool with_replicates) {
    nlohmann::json j{{"exchange", cell.exchange_id},
                     {"delta_t", cell.delta_t},
                     {"side", to_string(cell.side)},
                     {"estimator", to_string(cell.estimator)},
                     {"returns", cell.return_count},
                     {"fit", cell.fit ? to_json(*cell.fit) : nlohmann::json(nullptr)},
                     {"gof", cell.gof ? to_json(*cell.gof, with_replicates) : nlohmann::json(nullptr)},
                     {"pl_plausible", cell.gof ? nlohmann::json(cell.pl_plausible) : nlohmann::json(nullptr)}};
    if (!cell.ok()) j["error"] = cell.error;
    return j;
}

nlohmann::json to_json(const WindowFit& w) {
    nlohmann::json j{{"window", w.window.index},
                     {"start", iso_datetime(w.window.start)},
                     {"end", iso_datetime(w.window.end)},
                     {"side", to_string(w.side)},
                     {"returns", w.return_count},
                     {"fit", w.fit ? to_json(*w.fit) : nlohmann::json(nullptr)},
                     {"gof", w.gof ? to_json(*w.gof) : nlohmann::json(nullptr)}};
    if (!w.note.empty()) j["note"] = w.note;
    return j;
}

nlohmann::json to_json(const LiquidityCell& c) {
    return {{"exchange", c.exchange_id},
            {"window", c.window.index},
            {"side", to_string(c.side)},
            {"alpha", number(c.fit.alpha)},
            {"stderr", number(c.fit.std_error)},
            {"xmin", number(c.fit.xmin)},
            {"n", c.fit.n},
            {"mean_daily_usd_volume", number(c.mean_daily_usd_volume)}};
}

}  // namespace cryptotail
