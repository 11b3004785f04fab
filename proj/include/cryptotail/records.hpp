#pragma once

// JSON record forms of the result types, one object per line in .jsonl
// outputs. NaN and infinities serialize as null.

#include "cryptotail/gof.hpp"
#include "cryptotail/market_data.hpp"
#include "cryptotail/scalar_stats.hpp"
#include "cryptotail/studies.hpp"
#include "cryptotail/tail.hpp"

#include <json.hpp>

namespace cryptotail {

nlohmann::json to_json(const ExchangeDataset& dataset);
nlohmann::json to_json(const TailFit& fit);
/// `with_replicates` adds the full replicate distance list.
nlohmann::json to_json(const GofResult& gof, bool with_replicates = false);
nlohmann::json to_json(const RegressionResult& r);
nlohmann::json to_json(const CorrelationResult& r);
nlohmann::json to_json(const SweepCell& cell, bool with_replicates = false);
nlohmann::json to_json(const WindowFit& w);
nlohmann::json to_json(const LiquidityCell& c);

TailFit tail_fit_from_json(const nlohmann::json& j);

}  // namespace cryptotail
