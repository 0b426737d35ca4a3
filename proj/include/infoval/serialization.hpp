#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "infoval/backtest.hpp"
#include "infoval/dcc.hpp"
#include "infoval/dmtest.hpp"
#include "infoval/experiments.hpp"
#include "infoval/garch.hpp"
#include "infoval/scoring.hpp"

namespace infoval {

using Json = nlohmann::ordered_json;

// Scorers: {"type":"quantile_sstar","alpha":0.01},
// {"type":"quantile_general","alpha":0.05,"g":"identity" | "x_over_alpha" | "exp" |
//  {"x":[...],"y":[...]}}, {"type":"expectile","alpha":0.9}.
Json scorer_to_json(const PointScorer& scorer);
PointScorer scorer_from_json(const Json& j);

Json to_json(const GarchParams& p);
Json to_json(const DccParams& p);
Json to_json(const MixtureSpec& m);
Json to_json(const DmTestResult& r);
Json to_json(const BacktestReport& r);
Json to_json(const MixtureReport& r);
Json to_json(const ExperimentReport& r);

GarchParams garch_params_from_json(const Json& j);
DccParams dcc_params_from_json(const Json& j);

/// Canonical form of a configuration; the provenance hash is FNV-1a over its dump.
Json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const Json& j);
std::string config_hash(const ExperimentConfig& config);

/// YAML (or JSON, which YAML accepts) configuration text.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace infoval
