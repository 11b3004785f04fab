#include "cryptotail/market_data.hpp"

#include "cryptotail/calendar.hpp"
#include "cryptotail/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <memory>

namespace cryptotail {

ExchangeDataset::ExchangeDataset(std::string exchange_id, std::vector<Trade> trades,
                                 std::vector<CoverageInterval> coverage, IngestReport report)
    : exchange_id_(std::move(exchange_id)),
      trades_(std::move(trades)),
      coverage_(std::move(coverage)),
      report_(std::move(report)) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

/// Line-at-a-time CSV state machine shared by the stream and file readers.
/// Blank lines and lines starting with '#' are ignored.
class TradeCsvParser {
public:
    explicit TradeCsvParser(const IngestOptions& options) : options_(options) {}

    void consume(std::string_view line) {
        ++line_no_;
        line = trim(line);
        if (line.empty() || line.front() == '#') return;

        std::array<std::string_view, 3> fields;
        std::size_t count = 0;
        bool too_many = false;
        while (true) {
            const auto comma = line.find(',');
            const auto field = trim(line.substr(0, comma));
            if (count < fields.size()) {
                fields[count] = field;
            } else {
                too_many = true;
            }
            ++count;
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }

        Trade t;
        const bool ts_ok = parse_double(fields[0], t.timestamp);
        if (first_line_) {
            first_line_ = false;
            if (!ts_ok) {
                report_.header_skipped = true;
                return;
            }
        }
        if (too_many || count < 3) return reject("line", "expected 3 fields, got " + std::to_string(count));
        if (!ts_ok || !std::isfinite(t.timestamp)) return reject("timestamp", "not a finite number");
        if (!parse_double(fields[1], t.price) || !std::isfinite(t.price)) {
            return reject("price", "not a finite number");
        }
        if (!parse_double(fields[2], t.quantity) || !std::isfinite(t.quantity)) {
            return reject("quantity", "not a finite number");
        }
        if (t.price <= 0.0) return reject("price", "non-positive");
        if (t.quantity <= 0.0) return reject("quantity", "non-positive");
        trades_.push_back(t);
        ++report_.accepted;
    }

    std::vector<Trade> take_trades() { return std::move(trades_); }
    IngestReport take_report() { return std::move(report_); }

private:
    void reject(const char* field, std::string reason) {
        if (options_.strict) throw IngestError(line_no_, field, reason);
        ++report_.rejected;
        if (report_.rejected_samples.size() < kMaxRejectedSamples) {
            report_.rejected_samples.push_back({line_no_, field, std::move(reason)});
        }
    }

    IngestOptions options_;
    std::size_t line_no_ = 0;
    bool first_line_ = true;
    std::vector<Trade> trades_;
    IngestReport report_;
};

void validate_options(const IngestOptions& options) {
    if (!(options.gap_threshold > 0.0)) throw DataError("gap_threshold must be positive");
}

ExchangeDataset finish(std::string exchange_id, std::vector<Trade> trades, IngestReport report,
                       const IngestOptions& options) {
    if (trades.empty()) throw DataError("no trades");
    const auto by_time = [](const Trade& a, const Trade& b) { return a.timestamp < b.timestamp; };
    if (!std::is_sorted(trades.begin(), trades.end(), by_time)) {
        std::stable_sort(trades.begin(), trades.end(), by_time);
    }
    auto coverage = split_coverage(trades, options.gap_threshold);
    return ExchangeDataset(std::move(exchange_id), std::move(trades), std::move(coverage),
                           std::move(report));
}

struct GzCloser {
    void operator()(gzFile f) const { gzclose(f); }
};

}  // namespace

std::vector<CoverageInterval> split_coverage(std::span<const Trade> sorted, double gap_threshold) {
    std::vector<CoverageInterval> out;
    if (sorted.empty()) return out;
    CoverageInterval cur{sorted[0].timestamp, sorted[0].timestamp, 0, 1};
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].timestamp - sorted[i - 1].timestamp > gap_threshold) {
            out.push_back(cur);
            cur = {sorted[i].timestamp, sorted[i].timestamp, i, i + 1};
        } else {
            cur.end = sorted[i].timestamp;
            cur.last = i + 1;
        }
    }
    out.push_back(cur);
    return out;
}

ExchangeDataset ingest_trades(std::istream& source, std::string exchange_id,
                              const IngestOptions& options) {
    validate_options(options);
    TradeCsvParser parser(options);
    std::string line;
    while (std::getline(source, line)) parser.consume(line);
    return finish(std::move(exchange_id), parser.take_trades(), parser.take_report(), options);
}

ExchangeDataset ingest_file(const std::filesystem::path& path, std::string exchange_id,
                            const IngestOptions& options) {
    validate_options(options);
    // gzread passes uncompressed files through unchanged.
    std::unique_ptr<gzFile_s, GzCloser> file(gzopen(path.c_str(), "rb"));
    if (!file) throw DataError("cannot open " + path.string());
    gzbuffer(file.get(), 1 << 20);

    TradeCsvParser parser(options);
    std::vector<char> buf(1 << 20);
    std::string carry;
    while (true) {
        const int got = gzread(file.get(), buf.data(), static_cast<unsigned>(buf.size()));
        if (got < 0) {
            int errnum = 0;
            throw DataError("read error in " + path.string() + ": " + gzerror(file.get(), &errnum));
        }
        if (got == 0) break;
        std::string_view chunk(buf.data(), static_cast<std::size_t>(got));
        while (true) {
            const auto nl = chunk.find('\n');
            if (nl == std::string_view::npos) {
                carry.append(chunk);
                break;
            }
            if (carry.empty()) {
                parser.consume(chunk.substr(0, nl));
            } else {
                carry.append(chunk.substr(0, nl));
                parser.consume(carry);
                carry.clear();
            }
            chunk.remove_prefix(nl + 1);
        }
    }
    if (!carry.empty()) parser.consume(carry);
    return finish(std::move(exchange_id), parser.take_trades(), parser.take_report(), options);
}

ExchangeDataset make_dataset(std::string exchange_id, std::vector<Trade> trades,
                             const IngestOptions& options) {
    validate_options(options);
    IngestReport report;
    std::vector<Trade> kept;
    kept.reserve(trades.size());
    for (std::size_t i = 0; i < trades.size(); ++i) {
        const Trade& t = trades[i];
        const char* field = nullptr;
        const char* reason = nullptr;
        if (!std::isfinite(t.timestamp)) {
            field = "timestamp";
            reason = "not a finite number";
        } else if (!(t.price > 0.0) || !std::isfinite(t.price)) {
            field = "price";
            reason = "non-positive";
        } else if (!(t.quantity > 0.0) || !std::isfinite(t.quantity)) {
            field = "quantity";
            reason = "non-positive";
        }
        if (field != nullptr) {
            if (options.strict) throw IngestError(i + 1, field, reason);
            ++report.rejected;
            if (report.rejected_samples.size() < kMaxRejectedSamples) {
                report.rejected_samples.push_back({i + 1, field, reason});
            }
            continue;
        }
        kept.push_back(t);
    }
    report.accepted = kept.size();
    return finish(std::move(exchange_id), std::move(kept), std::move(report), options);
}

std::vector<ActivityDay> daily_activity(const ExchangeDataset& dataset) {
    if (dataset.size() == 0) throw DataError("no trades");

    std::vector<std::int64_t> days;
    for (const auto& iv : dataset.coverage()) {
        for (auto d = utc_day(iv.start); d <= utc_day(iv.end); ++d) days.push_back(d);
    }
    std::sort(days.begin(), days.end());
    days.erase(std::unique(days.begin(), days.end()), days.end());

    std::vector<ActivityDay> out(days.size());
    for (std::size_t i = 0; i < days.size(); ++i) out[i].day = days[i];

    std::size_t k = 0;
    for (const Trade& t : dataset.trades()) {
        const auto d = utc_day(t.timestamp);
        while (out[k].day < d) ++k;
        ++out[k].trade_count;
        out[k].usd_volume += t.price * t.quantity;
    }

    constexpr std::size_t kWindow = 30;
    double running = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        running += static_cast<double>(out[i].trade_count);
        if (i >= kWindow) running -= static_cast<double>(out[i - kWindow].trade_count);
        out[i].ma30_count = running / static_cast<double>(std::min(i + 1, kWindow));
    }
    return out;
}

}  // namespace cryptotail
