// Acceptance gate: one PASS/FAIL/SKIP line per criterion, exit 1 on any FAIL.
//
//   acceptance [--work-dir DIR] [--only N[,N...]]
//
// Criterion 10 needs the original exchange dumps and runs only when
// CRYPTOTAIL_DUMPS holds comma-separated exchange=path specs.

#include "cryptotail/cli.hpp"
#include "cryptotail/gof.hpp"
#include "cryptotail/market_data.hpp"
#include "cryptotail/returns.hpp"
#include "cryptotail/scalar_stats.hpp"
#include "cryptotail/tail.hpp"

#include "oracles.hpp"

#include <json.hpp>

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace cryptotail;
namespace fs = std::filesystem;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status;
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TailSample tail_of(std::vector<double> v) {
    TailSample t;
    t.values = std::move(v);
    return t;
}

std::vector<nlohmann::json> read_jsonl(const fs::path& p) {
    std::vector<nlohmann::json> out;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
    return out;
}

fs::path work_dir = fs::temp_directory_path() / "cryptotail_acceptance";

fs::path fresh_dir(const std::string& name) {
    const auto d = work_dir / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void require_ok(const cli::CommandResult& r, const char* what) {
    if (r.exit_code != cli::kOk) throw std::runtime_error(std::string(what) + " exited " + std::to_string(r.exit_code));
}

// 1 ------------------------------------------------------------------------
Outcome hill_recovery() {
    const double alpha = 2.5;
    const std::size_t n = 100000;
    int within = 0;
    double slowest = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto tail = tail_of(oracle::pareto_sample(alpha, 1.0, n, seed));
        const auto t0 = std::chrono::steady_clock::now();
        const auto fit = hill_estimate(tail, 1.0);
        slowest = std::max(slowest, seconds_since(t0));
        within += std::abs(fit.alpha - alpha) <= 3.0 * fit.alpha / std::sqrt(double(n)) ? 1 : 0;
    }
    return verdict(within >= 99 && slowest < 1.0,
                   fmt("%d/100 within 3 se (need 99), slowest fit %.4f s (need < 1)", within, slowest));
}

// 2 ------------------------------------------------------------------------
Outcome regression_recovery() {
    std::vector<double> x;
    std::vector<double> q;
    for (int i = 0; i <= 200; ++i) {
        x.push_back(std::pow(10.0, i / 50.0));
        q.push_back(std::pow(x.back(), -2.5));
    }
    const double a = regression_alpha_from_ccdf(x, q);
    return verdict(std::abs(a - 2.5) <= 1e-10, fmt("alpha %.15f, |error| %.2e (need <= 1e-10)", a, std::abs(a - 2.5)));
}

// 3 ------------------------------------------------------------------------
Outcome ks_oracle() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size(1, 10);
    std::uniform_real_distribution<double> a(0.5, 4.0);
    std::uniform_real_distribution<double> lo(0.1, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double xmin = lo(rng);
        auto v = oracle::pareto_sample(a(rng), xmin, static_cast<std::size_t>(size(rng)), rng());
        std::sort(v.begin(), v.end());
        const double alpha = a(rng);
        const double d = ks_statistic(v, alpha, xmin);
        worst = std::max(worst, static_cast<double>(std::abs(d - oracle::ks_brute(v, alpha, xmin))));
    }
    const std::vector<double> hand{1.0, 2.0, 4.0};
    const double d = ks_statistic(hand, 1.0, 1.0);
    return verdict(worst <= 1e-14 && std::abs(d - 1.0 / 3.0) <= 1e-15,
                   fmt("max |D - brute| %.2e over 50 instances (need <= 1e-14), {1,2,4} D = %.17g", worst, d));
}

// 4 ------------------------------------------------------------------------
Outcome xmin_selection() {
    int good = 0;
    double lo = 1e300;
    double hi = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto fit = select_xmin(tail_of(oracle::spliced_sample(100000, 7000 + seed)), Estimator::hill);
        lo = std::min(lo, fit.xmin);
        hi = std::max(hi, fit.xmin);
        const bool in_range = fit.xmin >= 2.5 && fit.xmin <= 10.0;
        good += in_range && std::abs(fit.alpha - 2.5) <= 3.0 * fit.std_error ? 1 : 0;
    }
    return verdict(good >= 90, fmt("%d/100 with xmin in [2.5, 10] and alpha within 3 se (need 90), xmin range [%.3f, %.3f]",
                                   good, lo, hi));
}

// 5 ------------------------------------------------------------------------
Outcome gof_calibration() {
    GofOptions o;
    std::vector<double> p;
    int rejected = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto tail = tail_of(oracle::pareto_sample(2.5, 1.0, 5000, 9000 + seed));
        const auto fit = hill_estimate(tail, 1.0);
        const auto g = gof_test(tail, fit, o, SeedPolicy{seed});
        p.push_back(g.p_value);
        rejected += g.reject() ? 1 : 0;
    }
    std::sort(p.begin(), p.end());
    double ks = 0.0;
    const auto m = static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        ks = std::max({ks, std::abs((i + 1) / m - p[i]), std::abs(p[i] - i / m)});
    }
    const double rate = rejected / m;
    return verdict(rate >= 0.01 && rate <= 0.12 && ks < 0.12,
                   fmt("rejection rate %.3f (need [0.01, 0.12]), p-value KS distance to uniform %.4f (need < 0.12)",
                       rate, ks));
}

// 6 ------------------------------------------------------------------------
Outcome gof_power() {
    GofOptions o;
    int rejected = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::mt19937_64 rng(seed * 7919);
        std::exponential_distribution<double> e(1.0);
        std::vector<double> v(2000);
        for (auto& x : v) x = 1.0 + e(rng);
        const auto tail = tail_of(std::move(v));
        const auto fit = hill_estimate(tail, 1.0);
        rejected += gof_test(tail, fit, o, SeedPolicy{seed}).reject() ? 1 : 0;
    }
    const std::vector<double> p{0.04};
    const auto b = bonferroni_adjust(p, 30);
    const bool bonf = !b.reject[0] && std::abs(b.threshold - 0.05 / 30.0) < 1e-15;
    return verdict(rejected >= 95 && bonf, fmt("%d/100 exponential tails rejected (need 95); m=30 threshold %.5f, p=0.04 %s",
                                               rejected, b.threshold, b.reject[0] ? "rejected" : "not rejected"));
}

// 7 ------------------------------------------------------------------------
Outcome determinism() {
    const auto dir = fresh_dir("determinism");
    cli::RunConfig c;
    FixtureOptions fx;
    fx.alpha = 2.3;
    fx.n = 20000;
    fx.seed = 5;
    require_ok(cli::cmd_fixture(c, fx, dir / "fx.csv"), "fixture");
    c.inputs = {{"fx", dir / "fx.csv"}};
    c.deltas = {60, 300};
    c.master_seed = 1234;
    std::vector<std::vector<double>> runs;
    std::set<std::string> texts;
    for (unsigned t : {1u, 4u, 16u}) {
        c.threads = t;
        c.output_dir = dir / ("j" + std::to_string(t));
        require_ok(cli::cmd_gof(c), "gof");
        std::vector<double> p;
        for (const auto& r : read_jsonl(c.output_dir / "gof.jsonl")) {
            if (r.contains("gof") && r["gof"].is_object()) p.push_back(r["gof"]["p_value"].get<double>());
        }
        runs.push_back(p);
        std::ifstream in(c.output_dir / "gof.jsonl", std::ios::binary);
        texts.insert({std::istreambuf_iterator<char>(in), {}});
    }
    bool same = runs[0].size() == 8;
    for (const auto& r : runs) {
        same = same && r.size() == runs[0].size() &&
               std::equal(r.begin(), r.end(), runs[0].begin(), [](double a, double b) {
                   return std::memcmp(&a, &b, sizeof a) == 0;
               });
    }
    return verdict(same && texts.size() == 1,
                   fmt("%zu p-values at threads 1/4/16: %s; output files %s", runs[0].size(),
                       same ? "bit-identical" : "DIFFER", texts.size() == 1 ? "identical" : "differ"));
}

// 8 ------------------------------------------------------------------------
Outcome scalar_statistics() {
    const double t = student_t_cdf(2.776, 4);
    const double t_ref = static_cast<double>(oracle::t_cdf_integrated(2.776L, 4.0L));
    const double phi = normal_cdf(1.959964);
    const double phi_ref = static_cast<double>(oracle::normal_cdf_integrated(1.959964L));
    std::mt19937_64 rng(88);
    std::uniform_int_distribution<int> size(5, 15);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto n = static_cast<std::size_t>(size(rng));
        const double slope = 0.3 * g(rng);
        std::vector<double> x(n);
        std::vector<double> y(n);
        for (std::size_t k = 0; k < n; ++k) {
            x[k] = g(rng) * 2.0 + 1.0;
            y[k] = 0.5 + slope * x[k] + g(rng);
        }
        const auto ols = ols_fit(x, y);
        const auto ref = oracle::ols_ref(x, y);
        const auto pr = pearson_test(x, y);
        const auto pref = oracle::pearson_ref(x, y);
        worst = std::max({worst, std::abs(ols.p0 - ref.p0), std::abs(ols.p1 - ref.p1), std::abs(pr.p_value - pref.p)});
    }
    const bool ok = std::abs(t - 0.9750) <= 1e-4 && std::abs(t - t_ref) <= 1e-4 && std::abs(phi - 0.975) <= 1e-6 &&
                    std::abs(phi - phi_ref) <= 1e-6 && worst <= 1e-6;
    return verdict(ok, fmt("t4(2.776) = %.6f (integrated %.6f), Phi(1.959964) = %.8f (integrated %.8f), "
                           "max OLS/Pearson p-value error %.2e over 20 datasets",
                           t, t_ref, phi, phi_ref, worst));
}

// 9 ------------------------------------------------------------------------
Outcome pipeline_scale() {
    const auto dir = fresh_dir("scale");
    cli::RunConfig c;
    FixtureOptions fx;
    fx.n = 5000000;
    fx.min_trades_per_bar = 2;
    fx.max_trades_per_bar = 2;
    fx.seed = 3;
    const auto file = dir / "big.csv";
    require_ok(cli::cmd_fixture(c, fx, file), "fixture");
    std::size_t rows = 0;
    {
        std::ifstream in(file);
        for (std::string line; std::getline(in, line);) rows += (!line.empty() && line[0] != '#' && line[0] != 't') ? 1 : 0;
    }
    c.inputs = {{"big", file}};
    c.deltas = {60};
    c.output_dir = dir / "out";
    const auto t0 = std::chrono::steady_clock::now();
    require_ok(cli::cmd_fit(c), "fit");
    const double secs = seconds_since(t0);
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    const double gb = ru.ru_maxrss / (1024.0 * 1024.0);
    fs::remove(file);
    return verdict(rows >= 10000000 && secs < 60.0 && gb < 2.0,
                   fmt("%zu rows: ingest+resample+fit %.1f s (need < 60), peak RSS %.2f GB (need < 2)", rows, secs, gb));
}

// 10 -----------------------------------------------------------------------
Outcome data_dependent() {
    const char* dumps = std::getenv("CRYPTOTAIL_DUMPS");
    if (dumps == nullptr || *dumps == '\0') return {Status::skip, "set CRYPTOTAIL_DUMPS=exchange=path,... to run"};
    cli::RunConfig c;
    std::stringstream ss(dumps);
    for (std::string spec; std::getline(ss, spec, ',');) c.inputs.push_back(cli::parse_input(spec));
    c.deltas = {60, 300, 600};
    c.threads = 0;
    const auto datasets = cli::load_datasets(c);
    const auto cells = cli::fit_cells(c, datasets, false);
    int in_range = 0;
    int fitted = 0;
    std::string bitfinex = "no bitfinex input";
    bool bitfinex_ok = true;
    for (const auto& cell : cells) {
        if (!cell.ok()) continue;
        ++fitted;
        in_range += cell.fit->alpha > 2.0 && cell.fit->alpha < 2.5 ? 1 : 0;
        if (cell.exchange_id == "bitfinex" && cell.delta_t == 60 && cell.side == Side::positive &&
            cell.estimator == Estimator::hill) {
            bitfinex_ok = std::abs(cell.fit->alpha - 2.15) <= 0.05;
            bitfinex = fmt("bitfinex 1-min positive Hill %.3f (need 2.15 +- 0.05)", cell.fit->alpha);
        }
    }
    return verdict(2 * in_range > fitted && bitfinex_ok,
                   fmt("%d/%d cells with 2 < alpha < 2.5; ", in_range, fitted) + bitfinex);
}

// 11 -----------------------------------------------------------------------
Outcome end_to_end() {
    int good = 0;
    int within = 0;
    int plausible = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto dir = fresh_dir("chain");
        cli::RunConfig c;
        FixtureOptions fx;
        fx.alpha = 2.3;
        fx.n = 20000;
        fx.seed = seed;
        require_ok(cli::cmd_fixture(c, fx, dir / "fx.csv"), "fixture");
        c.inputs = {{"fx", dir / "fx.csv"}};
        c.deltas = {60};
        c.estimators = {Estimator::hill};
        c.sides = {Side::positive};
        c.master_seed = seed;
        c.output_dir = dir;
        require_ok(cli::cmd_fit(c), "fit");
        require_ok(cli::cmd_gof(c), "gof");
        const auto fit = read_jsonl(dir / "fits.jsonl").at(1)["fit"];
        const auto gof = read_jsonl(dir / "gof.jsonl").at(1);
        if (gof["fit"] != fit) throw std::runtime_error("gof refit differs from fit");
        const bool w = std::abs(fit["alpha"].get<double>() - 2.3) <= 3.0 * fit["stderr"].get<double>();
        const bool p = gof["gof"]["p_value"].get<double>() >= 0.05;
        within += w ? 1 : 0;
        plausible += p ? 1 : 0;
        good += w && p ? 1 : 0;
    }
    fs::remove_all(work_dir / "chain");
    return verdict(good >= 90, fmt("%d/100 seeds within 3 se and p >= 0.05 (need 90); %d within, %d plausible", good,
                                   within, plausible));
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--work-dir" && i + 1 < argc) {
            work_dir = argv[++i];
        } else if (a == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string id; std::getline(ss, id, ',');) only.insert(std::stoi(id));
        } else {
            std::fprintf(stderr, "usage: acceptance [--work-dir DIR] [--only N[,N...]]\n");
            return 2;
        }
    }
    fs::create_directories(work_dir);

    const std::vector<Criterion> criteria{
        {1, "hill recovery", hill_recovery},
        {2, "regression recovery", regression_recovery},
        {3, "ks oracle equivalence", ks_oracle},
        {4, "xmin selection", xmin_selection},
        {5, "gof calibration", gof_calibration},
        {6, "gof power", gof_power},
        {7, "determinism", determinism},
        {8, "scalar statistics", scalar_statistics},
        {9, "pipeline scale", pipeline_scale},
        {10, "data-dependent", data_dependent},
        {11, "end-to-end fixture", end_to_end},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
        failures += o.status == Status::fail ? 1 : 0;
        std::printf("AC%-2d %s  %-22s %s  [%.1f s]\n", c.id, tag, c.name, o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
