#include "cryptotail/fixture.hpp"

#include "cryptotail/error.hpp"
#include "cryptotail/gof.hpp"
#include "cryptotail/rng.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace cryptotail {

FixtureBody parse_fixture_body(std::string_view s) {
    if (s == "none" || s == "pareto") return FixtureBody::none;
    if (s == "gaussian" || s == "normal") return FixtureBody::gaussian;
    throw Error("unknown fixture body '" + std::string(s) + "'");
}

std::string_view to_string(FixtureBody body) { return body == FixtureBody::none ? "none" : "gaussian"; }

void validate(const FixtureOptions& o) {
    if (!(o.alpha > 0.0)) throw DataError("fixture: alpha must be positive");
    if (!(o.xmin > 0.0)) throw DataError("fixture: xmin must be positive");
    if (o.n < 1) throw DataError("fixture: n must be at least 1");
    if (!(o.delta_t > 0.0)) throw DataError("fixture: delta_t must be positive");
    if (!(o.scale > 0.0)) throw DataError("fixture: scale must be positive");
    if (!(o.start_price > 0.0)) throw DataError("fixture: start_price must be positive");
    if (!(o.tail_fraction > 0.0 && o.tail_fraction <= 1.0)) {
        throw DataError("fixture: tail_fraction must lie in (0, 1]");
    }
    if (o.min_trades_per_bar < 1 || o.max_trades_per_bar < o.min_trades_per_bar) {
        throw DataError("fixture: need 1 <= min_trades_per_bar <= max_trades_per_bar");
    }
}

namespace {

double draw_return(const FixtureOptions& o, Rng& rng) {
    double magnitude = 0.0;
    if (o.body == FixtureBody::none || uniform_open0(rng) <= o.tail_fraction) {
        magnitude = pareto_from_uniform(uniform_open0(rng), o.alpha, o.xmin);
    } else {
        do {
            magnitude = std::abs(standard_normal(rng)) * 0.5 * o.xmin;
        } while (magnitude >= o.xmin);
    }
    const double sign = (rng() >> 63) != 0 ? 1.0 : -1.0;
    return sign * magnitude * o.scale;
}

class RowWriter {
public:
    explicit RowWriter(std::ostream& out) : out_(out) { buf_.reserve(kFlushAt + 256); }
    ~RowWriter() { flush(); }

    void row(double ts, double price, double qty) {
        put(ts);
        buf_.push_back(',');
        put(price);
        buf_.push_back(',');
        put(qty);
        buf_.push_back('\n');
        if (buf_.size() >= kFlushAt) flush();
    }

    void flush() {
        out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        buf_.clear();
    }

private:
    static constexpr std::size_t kFlushAt = 1 << 20;

    void put(double v) {
        char tmp[32];
        const auto res = std::to_chars(tmp, tmp + sizeof tmp, v);
        buf_.append(tmp, res.ptr);
    }

    std::ostream& out_;
    std::string buf_;
};

}  // namespace

std::vector<double> fixture_returns(const FixtureOptions& options) {
    validate(options);
    Rng rng(options.seed);
    std::vector<double> r(options.n);
    for (auto& v : r) v = draw_return(options, rng);
    return r;
}

std::size_t write_fixture_csv(std::ostream& out, const FixtureOptions& o,
                              const std::vector<std::string>& preamble) {
    validate(o);
    for (const auto& line : preamble) out << "# " << line << '\n';
    out << "timestamp,price,quantity\n";

    Rng returns_rng(o.seed);
    Rng layout_rng(mix64(o.seed) ^ 0x6c61796f7574ULL);
    RowWriter w(out);
    const unsigned spread = o.max_trades_per_bar - o.min_trades_per_bar + 1;
    auto quantity = [&] { return std::round(std::exp(standard_normal(layout_rng)) * 1e6) / 1e8 + 1e-8; };

    double price = o.start_price;
    w.row(o.start, price, quantity());
    std::size_t rows = 1;
    for (std::size_t k = 1; k <= o.n; ++k) {
        const double r = draw_return(o, returns_rng);
        const double next = price * std::exp(r);
        const unsigned m = o.min_trades_per_bar + static_cast<unsigned>(layout_rng() % spread);
        const double bar_open = o.start + static_cast<double>(k - 1) * o.delta_t;
        for (unsigned i = 0; i < m; ++i) {
            const double ts = bar_open + o.delta_t * static_cast<double>(i + 1) / static_cast<double>(m + 1);
            // Intrabar trades wander between the two closes; only the last one sets the bar price.
            const double p = i + 1 == m ? next : price * std::exp(r * uniform_open0(layout_rng));
            w.row(ts, p, quantity());
            ++rows;
        }
        price = next;
    }
    w.flush();
    return rows;
}

}  // namespace cryptotail
