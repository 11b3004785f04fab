#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cryptotail {

enum class FixtureBody {
    none,      // every return magnitude is Pareto(alpha, xmin)
    gaussian,  // Pareto tail with probability tail_fraction, |N| body below xmin otherwise
};

FixtureBody parse_fixture_body(std::string_view s);
std::string_view to_string(FixtureBody body);

/// Synthetic trade stream whose delta_t-bar log-returns are known: each
/// return is sign * scale * m with m drawn according to `body`.
struct FixtureOptions {
    double alpha = 2.5;
    double xmin = 1.0;  // tail threshold, in units of `scale`
    std::size_t n = 100000;  // number of bar returns
    std::uint64_t seed = 7;
    FixtureBody body = FixtureBody::none;
    double tail_fraction = 0.1;
    double delta_t = 60.0;
    double scale = 1e-3;
    double start = 1388534400.0;  // 2014-01-01T00:00:00Z, a multiple of every default delta
    double start_price = 500.0;
    unsigned min_trades_per_bar = 1;
    unsigned max_trades_per_bar = 3;
};

void validate(const FixtureOptions& options);

/// The n log-returns the fixture encodes, in bar order.
std::vector<double> fixture_returns(const FixtureOptions& options);

/// Writes `timestamp,price,quantity` rows (with a header) and returns the
/// number of trade rows. `preamble` lines are emitted first as `#` comments.
std::size_t write_fixture_csv(std::ostream& out, const FixtureOptions& options,
                              const std::vector<std::string>& preamble = {});

}  // namespace cryptotail
