#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "npfuse/scenario.hpp"

namespace npfuse {

// Scenario files are JSON objects with flat keys and per-sensor arrays:
//
//   name              string (optional)
//   sensor_positions  [m, ...]            or  sensor_count + spacing
//   background        [cps, ...]          or a single number for all sensors
//   source_kind       "radiation" (default) | "constant"
//   source_x0, source_offset, source_speed, source_strength   (radiation)
//   source_rates      [cps, ...] or number                    (constant)
//   horizon           seconds, or "pass-through" (radiation with uniform spacing)
//   nu_min, nu_max    optional overrides for the bound constants
//
// Unknown keys are rejected so that typos surface as errors.

ScenarioConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

/// Throws InputError when the file is unreadable or invalid.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// A preset name or, when `config_path` is non-empty, a scenario file.
ScenarioConfig resolve_scenario(const std::string& preset_name, const std::string& config_path);

}  // namespace npfuse
