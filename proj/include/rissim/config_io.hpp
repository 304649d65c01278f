#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rissim/scenario.hpp"

namespace rissim {

// Config file schema: top-level objects "system", "geometry", "algo" and a
// top-level "seed". Unknown keys are rejected with their full path.
nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const nlohmann::json& j);

ScenarioConfig load_scenario_file(const std::string& path);

// Applies one "dotted.path=value" override onto the JSON form of a config.
// Values are parsed as JSON scalars, falling back to strings.
void apply_override(nlohmann::ordered_json& j, const std::string& key_eq_value);

// Preset (or file) -> overrides -> validated config.
ScenarioConfig resolve_scenario(const std::string& config_path, int preset_q,
                                const std::vector<std::string>& overrides);

}  // namespace rissim
