#pragma once

#include <string>

#include <json.hpp>

#include "core/driver.hpp"

namespace cbo {

// A campaign as described by a config file: what to run and where to write it.
struct CampaignSettings {
  RunConfig run;
  std::string out_dir = "run";
};

/// Parses a config document. Unknown keys, wrong types and inconsistent
/// values throw ConfigError naming the offending key.
CampaignSettings parse_config(const nlohmann::json& doc);
CampaignSettings parse_config_text(const std::string& text);

/// Top-level keys of `overrides` replace those of `base`.
nlohmann::json merge_overrides(nlohmann::json base, const nlohmann::json& overrides);

/// Canonical, fully explicit form; parse_config(to_json(s)) reproduces s.
nlohmann::json to_json(const CampaignSettings& s);

/// "toy2d", "ldmos9-surrogate", or "cmd:ARGV" with whitespace-separated argv.
EvaluatorSpec parse_evaluator_flag(const std::string& text);

}  // namespace cbo
