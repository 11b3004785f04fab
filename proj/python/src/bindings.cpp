#include "cryptotail/cli.hpp"
#include "cryptotail/error.hpp"
#include "cryptotail/fixture.hpp"
#include "cryptotail/gof.hpp"
#include "cryptotail/market_data.hpp"
#include "cryptotail/returns.hpp"
#include "cryptotail/scalar_stats.hpp"
#include "cryptotail/tail.hpp"

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace cryptotail;

namespace {

TailSample tail_of(std::vector<double> values, const std::string& side) {
    TailSample t;
    t.side = parse_side(side);
    t.values = std::move(values);
    return t;
}

FitOptions fit_options(std::size_t n_min, std::size_t max_candidates, unsigned threads) {
    FitOptions o;
    o.n_min = n_min;
    o.max_candidates = max_candidates;
    o.threads = threads;
    return o;
}

py::dict ccdf_dict(const CcdfPoints& c) {
    py::dict d;
    d["x"] = c.x;
    d["ccdf"] = c.ccdf;
    d["normal_ccdf"] = c.normal_ccdf;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Power-law tail estimation for high-frequency trade data";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto data_error = py::register_exception<DataError>(m, "DataError", error.ptr());
    py::register_exception<NumericError>(m, "NumericError", error.ptr());
    py::register_exception<IngestError>(m, "IngestError", data_error.ptr());

    py::class_<ExchangeDataset>(m, "ExchangeDataset")
        .def_property_readonly("exchange_id", &ExchangeDataset::exchange_id)
        .def("__len__", &ExchangeDataset::size)
        .def_property_readonly("timestamps",
                               [](const ExchangeDataset& d) {
                                   std::vector<double> v;
                                   for (const auto& t : d.trades()) v.push_back(t.timestamp);
                                   return v;
                               })
        .def_property_readonly("prices",
                               [](const ExchangeDataset& d) {
                                   std::vector<double> v;
                                   for (const auto& t : d.trades()) v.push_back(t.price);
                                   return v;
                               })
        .def_property_readonly("coverage",
                               [](const ExchangeDataset& d) {
                                   std::vector<std::pair<double, double>> v;
                                   for (const auto& c : d.coverage()) v.emplace_back(c.start, c.end);
                                   return v;
                               })
        .def_property_readonly("accepted", [](const ExchangeDataset& d) { return d.report().accepted; })
        .def_property_readonly("rejected", [](const ExchangeDataset& d) { return d.report().rejected; })
        .def("__repr__", [](const ExchangeDataset& d) {
            return "<ExchangeDataset " + d.exchange_id() + " trades=" + std::to_string(d.size()) + ">";
        });

    py::class_<TailFit>(m, "TailFit")
        .def_property_readonly("estimator", [](const TailFit& f) { return std::string(to_string(f.estimator)); })
        .def_property_readonly("side", [](const TailFit& f) { return std::string(to_string(f.side)); })
        .def_readonly("alpha", &TailFit::alpha)
        .def_readonly("xmin", &TailFit::xmin)
        .def_readonly("n", &TailFit::n)
        .def_readonly("std_error", &TailFit::std_error)
        .def_readonly("ks", &TailFit::ks)
        .def(py::self == py::self)
        .def("__repr__", [](const TailFit& f) {
            std::ostringstream s;
            s << "<TailFit " << to_string(f.estimator) << " alpha=" << f.alpha << " xmin=" << f.xmin << " n=" << f.n
              << ">";
            return s.str();
        });

    py::class_<GofResult>(m, "GofResult")
        .def_readonly("d_emp", &GofResult::d_emp)
        .def_readonly("replicates", &GofResult::replicates)
        .def_readonly("d_synthetic", &GofResult::d_synthetic)
        .def_readonly("p_value", &GofResult::p_value)
        .def_readonly("master_seed", &GofResult::master_seed)
        .def_readonly("alpha_hat", &GofResult::alpha_hat)
        .def_readonly("xmin", &GofResult::xmin)
        .def_readonly("n", &GofResult::n)
        .def_readonly("confidence", &GofResult::confidence)
        .def_readonly("redraws", &GofResult::redraws)
        .def("reject", &GofResult::reject)
        .def("plausible", &GofResult::plausible)
        .def("quantile", &GofResult::quantile);

    py::class_<RegressionResult>(m, "RegressionResult")
        .def_readonly("beta0", &RegressionResult::beta0)
        .def_readonly("beta1", &RegressionResult::beta1)
        .def_readonly("se0", &RegressionResult::se0)
        .def_readonly("se1", &RegressionResult::se1)
        .def_readonly("t0", &RegressionResult::t0)
        .def_readonly("t1", &RegressionResult::t1)
        .def_readonly("p0", &RegressionResult::p0)
        .def_readonly("p1", &RegressionResult::p1)
        .def_readonly("n", &RegressionResult::n)
        .def_readonly("exact_fit", &RegressionResult::exact_fit);

    py::class_<CorrelationResult>(m, "CorrelationResult")
        .def_readonly("r", &CorrelationResult::r)
        .def_readonly("n", &CorrelationResult::n)
        .def_readonly("t_stat", &CorrelationResult::t_stat)
        .def_readonly("p_value", &CorrelationResult::p_value);

    // Market data and returns.
    m.def(
        "ingest_file",
        [](const std::filesystem::path& path, std::string exchange_id, double gap_threshold, bool strict) {
            IngestOptions o;
            o.gap_threshold = gap_threshold;
            o.strict = strict;
            py::gil_scoped_release release;
            return ingest_file(path, std::move(exchange_id), o);
        },
        py::arg("path"), py::arg("exchange_id"), py::arg("gap_threshold") = 86400.0, py::arg("strict") = false);
    m.def(
        "make_dataset",
        [](std::string exchange_id, const std::vector<double>& timestamps, const std::vector<double>& prices,
           std::optional<std::vector<double>> quantities, double gap_threshold) {
            if (timestamps.size() != prices.size() || (quantities && quantities->size() != prices.size())) {
                throw DataError("make_dataset: column lengths differ");
            }
            std::vector<Trade> trades(timestamps.size());
            for (std::size_t i = 0; i < trades.size(); ++i) {
                trades[i] = {timestamps[i], prices[i], quantities ? (*quantities)[i] : 1.0};
            }
            IngestOptions o;
            o.gap_threshold = gap_threshold;
            return make_dataset(std::move(exchange_id), std::move(trades), o);
        },
        py::arg("exchange_id"), py::arg("timestamps"), py::arg("prices"), py::arg("quantities") = py::none(),
        py::arg("gap_threshold") = 86400.0);
    m.def(
        "log_returns",
        [](const ExchangeDataset& d, double delta_t, bool drop_zero_returns) {
            return log_returns(resample_bars(d, delta_t), drop_zero_returns).values;
        },
        py::arg("dataset"), py::arg("delta_t"), py::arg("drop_zero_returns") = false);
    m.def(
        "standardized_returns",
        [](const ExchangeDataset& d, double delta_t, bool drop_zero_returns) {
            return standardized_returns(d, delta_t, drop_zero_returns).values;
        },
        py::arg("dataset"), py::arg("delta_t"), py::arg("drop_zero_returns") = false);

    // Tail estimation.
    m.def(
        "make_tail",
        [](std::vector<double> returns, const std::string& side) {
            ReturnSeries r;
            r.values = std::move(returns);
            return make_tail(r, parse_side(side)).values;
        },
        py::arg("returns"), py::arg("side") = "positive");
    m.def("empirical_ccdf", [](const std::vector<double>& v) { return ccdf_dict(empirical_ccdf(v)); }, py::arg("values"));
    m.def(
        "hill_estimate",
        [](std::vector<double> v, double xmin, const std::string& side) { return hill_estimate(tail_of(std::move(v), side), xmin); },
        py::arg("values"), py::arg("xmin"), py::arg("side") = "positive");
    m.def(
        "regression_estimate",
        [](std::vector<double> v, double xmin, const std::string& side) {
            return regression_estimate(tail_of(std::move(v), side), xmin);
        },
        py::arg("values"), py::arg("xmin"), py::arg("side") = "positive");
    m.def(
        "fit_tail",
        [](std::vector<double> v, const std::string& estimator, double xmin, const std::string& side) {
            return fit_tail(tail_of(std::move(v), side), parse_estimator(estimator), xmin);
        },
        py::arg("values"), py::arg("estimator"), py::arg("xmin"), py::arg("side") = "positive");
    m.def(
        "select_xmin",
        [](std::vector<double> v, const std::string& estimator, const std::string& side, std::size_t n_min,
           std::size_t max_candidates, unsigned threads) {
            const auto tail = tail_of(std::move(v), side);
            const auto est = parse_estimator(estimator);
            py::gil_scoped_release release;
            return select_xmin(tail, est, fit_options(n_min, max_candidates, threads));
        },
        py::arg("values"), py::arg("estimator") = "hill", py::arg("side") = "positive", py::arg("n_min") = 50,
        py::arg("max_candidates") = 2000, py::arg("threads") = 1);
    m.def(
        "ks_statistic",
        [](std::vector<double> sorted_tail, double alpha, double xmin) { return ks_statistic(sorted_tail, alpha, xmin); },
        py::arg("sorted_tail"), py::arg("alpha"), py::arg("xmin"));

    // Goodness of fit.
    m.def("sample_pareto", &sample_pareto, py::arg("alpha"), py::arg("xmin"), py::arg("n"), py::arg("seed"));
    m.def(
        "gof_test",
        [](std::vector<double> v, const TailFit& fit, std::size_t replicates, double confidence, std::uint64_t seed,
           bool refit_xmin, unsigned threads) {
            GofOptions o;
            o.replicates = replicates;
            o.confidence = confidence;
            o.refit_xmin = refit_xmin;
            o.threads = threads;
            const auto tail = tail_of(std::move(v), std::string(to_string(fit.side)));
            py::gil_scoped_release release;
            return gof_test(tail, fit, o, SeedPolicy{seed});
        },
        py::arg("values"), py::arg("fit"), py::arg("replicates") = 1000, py::arg("confidence") = 0.95,
        py::arg("seed") = 0, py::arg("refit_xmin") = false, py::arg("threads") = 1);
    m.def(
        "bonferroni_adjust",
        [](const std::vector<double>& p, std::size_t m, double confidence) {
            const auto b = bonferroni_adjust(p, m, confidence);
            return py::make_tuple(b.threshold, b.reject);
        },
        py::arg("p_values"), py::arg("m"), py::arg("confidence") = 0.95);

    // Scalar statistics.
    m.def("normal_cdf", &normal_cdf, py::arg("x"));
    m.def("student_t_cdf", &student_t_cdf, py::arg("x"), py::arg("dof"));
    m.def(
        "ols_fit", [](const std::vector<double>& x, const std::vector<double>& y) { return ols_fit(x, y); }, py::arg("x"),
        py::arg("y"));
    m.def(
        "pearson_test", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson_test(x, y); },
        py::arg("x"), py::arg("y"));

    // Fixtures and the command line.
    m.def(
        "fixture_returns",
        [](double alpha, std::size_t n, std::uint64_t seed, double xmin, double scale) {
            FixtureOptions o;
            o.alpha = alpha;
            o.n = n;
            o.seed = seed;
            o.xmin = xmin;
            o.scale = scale;
            validate(o);
            return fixture_returns(o);
        },
        py::arg("alpha"), py::arg("n"), py::arg("seed") = 7, py::arg("xmin") = 1.0, py::arg("scale") = 1e-3);
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the cryptotail command line; returns (exit_code, stdout, stderr).");
}
