#pragma once

// JSON form of ScenarioConfig. Unknown keys are rejected; missing keys keep
// their defaults.

#include <string>

#include "btcsim/scenario.hpp"

namespace btcsim {

/// Parses `text` on top of `base`. Throws ConfigError on malformed input.
ScenarioConfig config_from_json(const std::string& text, const ScenarioConfig& base = {});

ScenarioConfig load_config(const std::string& path, const ScenarioConfig& base = {});

/// Every field, so that config_from_json(config_to_json(c)) == c.
std::string config_to_json(const ScenarioConfig& config);

}  // namespace btcsim
