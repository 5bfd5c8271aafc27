#include "npfuse/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "npfuse/error.hpp"

namespace npfuse {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "name",          "sensor_positions", "sensor_count",    "spacing",
      "background",    "source_kind",      "source_x0",       "source_offset",
      "source_speed",  "source_strength",  "source_rates",    "horizon",
      "nu_min",        "nu_max"};
  return keys;
}

double number(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw InputError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> per_sensor(const json& doc, const char* key, std::size_t k) {
  const auto& v = doc.at(key);
  if (v.is_number()) return std::vector<double>(k, v.get<double>());
  if (!v.is_array()) throw InputError(std::string("'") + key + "' must be a number or array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw InputError(std::string("'") + key + "' entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("scenario document must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!known_keys().count(key)) throw InputError("unknown scenario key '" + key + "'");
  }
  ScenarioConfig cfg;
  try {
    if (doc.contains("name")) cfg.name = doc.at("name").get<std::string>();

    std::optional<double> spacing;
    if (doc.contains("sensor_positions")) {
      cfg.sensor_positions = per_sensor(doc, "sensor_positions", 0);
    } else {
      if (!doc.contains("sensor_count") || !doc.contains("spacing")) {
        throw InputError("need sensor_positions or sensor_count + spacing");
      }
      const auto& kc = doc.at("sensor_count");
      if (!kc.is_number_integer() || kc.get<long long>() < 1) {
        throw InputError("sensor_count must be a positive integer");
      }
      spacing = number(doc, "spacing");
      cfg.sensor_positions =
          uniform_positions(static_cast<std::size_t>(kc.get<long long>()), *spacing);
    }
    const std::size_t k = cfg.sensor_count();
    cfg.background = per_sensor(doc, "background", k);

    const std::string kind = doc.value("source_kind", std::string("radiation"));
    if (kind == "radiation") {
      cfg.source_kind = SourceKind::radiation;
      cfg.source_x0 = number(doc, "source_x0");
      cfg.source_offset = number(doc, "source_offset");
      cfg.source_speed = number(doc, "source_speed");
      cfg.source_strength = number(doc, "source_strength");
    } else if (kind == "constant") {
      cfg.source_kind = SourceKind::constant;
      cfg.source_rates = per_sensor(doc, "source_rates", k);
    } else {
      throw InputError("source_kind must be 'radiation' or 'constant'");
    }

    const auto& h = doc.at("horizon");
    if (h.is_string()) {
      if (h.get<std::string>() != "pass-through" || cfg.source_kind != SourceKind::radiation ||
          !spacing) {
        throw InputError(
            "horizon \"pass-through\" needs a radiation source and sensor_count + spacing");
      }
      cfg.horizon = pass_through_horizon(k, *spacing, cfg.source_x0, cfg.source_speed);
    } else {
      cfg.horizon = number(doc, "horizon");
    }
    if (doc.contains("nu_min")) cfg.nu_min_override = number(doc, "nu_min");
    if (doc.contains("nu_max")) cfg.nu_max_override = number(doc, "nu_max");
  } catch (const json::exception& e) {
    throw InputError(std::string("scenario: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["sensor_positions"] = cfg.sensor_positions;
  doc["background"] = cfg.background;
  if (cfg.source_kind == SourceKind::radiation) {
    doc["source_kind"] = "radiation";
    doc["source_x0"] = cfg.source_x0;
    doc["source_offset"] = cfg.source_offset;
    doc["source_speed"] = cfg.source_speed;
    doc["source_strength"] = cfg.source_strength;
  } else {
    doc["source_kind"] = "constant";
    doc["source_rates"] = cfg.source_rates;
  }
  doc["horizon"] = cfg.horizon;
  if (cfg.nu_min_override) doc["nu_min"] = *cfg.nu_min_override;
  if (cfg.nu_max_override) doc["nu_max"] = *cfg.nu_max_override;
  return doc;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw InputError("cannot parse '" + path.string() + "': " + e.what());
  }
  auto cfg = scenario_from_json(doc);
  if (cfg.name.empty()) cfg.name = path.stem().string();
  return cfg;
}

ScenarioConfig resolve_scenario(const std::string& preset_name, const std::string& config_path) {
  if (!config_path.empty() && !preset_name.empty()) {
    throw InputError("give either a preset or a config file, not both");
  }
  if (!config_path.empty()) return load_scenario(config_path);
  if (preset_name.empty()) throw InputError("no scenario: pass --preset or --config");
  return preset(preset_name);
}

}  // namespace npfuse
