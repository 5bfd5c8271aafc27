#include "npfuse/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "npfuse/error.hpp"

namespace npfuse {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

void check_sensor(const ScenarioConfig& cfg, std::size_t sensor) {
  if (sensor >= cfg.sensor_count()) {
    std::ostringstream os;
    os << "sensor index " << sensor << " out of range [0, " << cfg.sensor_count() << ")";
    throw InputError(os.str());
  }
}

void check_time(const ScenarioConfig& cfg, double t) {
  if (!(t >= 0.0 && t <= cfg.horizon)) {
    std::ostringstream os;
    os << "time " << t << " outside [0, " << cfg.horizon << "]";
    throw InputError(os.str());
  }
}

PassingSource passing_source(const ScenarioConfig& cfg, std::size_t sensor) {
  return PassingSource{cfg.sensor_positions[sensor], cfg.source_x0, cfg.source_offset,
                       cfg.source_speed, cfg.source_strength};
}

// 14.25 in expressed in meters.
constexpr double kPresetOffset = 14.25 * 0.0254;

}  // namespace

void ScenarioConfig::validate() const {
  const std::size_t k = sensor_count();
  require(k >= 1, "scenario needs at least one sensor");
  require(background.size() == k, "background needs one rate per sensor");
  require(std::isfinite(horizon) && horizon > 0.0, "horizon T must be finite and > 0");
  for (double x : sensor_positions) require(std::isfinite(x), "sensor positions must be finite");
  for (double b : background) {
    require(std::isfinite(b) && b > 0.0, "background rates must be finite and > 0");
  }
  if (source_kind == SourceKind::radiation) {
    require(std::isfinite(source_offset) && source_offset > 0.0, "source offset h must be > 0");
    require(std::isfinite(source_speed), "source speed must be finite");
    require(std::isfinite(source_x0), "source x0 must be finite");
    require(std::isfinite(source_strength) && source_strength >= 0.0,
            "source strength must be finite and >= 0");
  } else {
    require(source_rates.size() == k, "constant source needs one rate per sensor");
    for (double r : source_rates) {
      require(std::isfinite(r) && r >= 0.0, "source rates must be finite and >= 0");
    }
  }
  if (nu_min_override) require(*nu_min_override >= 0.0, "nu_min override must be >= 0");
  if (nu_max_override) require(*nu_max_override >= 0.0, "nu_max override must be >= 0");
  if (nu_min_override && nu_max_override) {
    require(*nu_min_override <= *nu_max_override, "nu_min override exceeds nu_max override");
  }
}

std::vector<double> uniform_positions(std::size_t count, double spacing) {
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = static_cast<double>(i) * spacing;
  return xs;
}

double pass_through_horizon(std::size_t count, double spacing, double x0, double speed) {
  if (count == 0 || !(speed != 0.0)) throw InputError("pass-through horizon needs k >= 1, v != 0");
  const double T = (static_cast<double>(count - 1) * spacing - 2.0 * x0) / speed;
  if (!(T > 0.0)) throw InputError("pass-through horizon is not positive");
  return T;
}

double source_distance(const ScenarioConfig& cfg, std::size_t sensor, double t) {
  check_sensor(cfg, sensor);
  check_time(cfg, t);
  if (cfg.source_kind != SourceKind::radiation) {
    throw InputError("source distance is only defined for a radiation source");
  }
  const double dx = cfg.source_x0 + cfg.source_speed * t - cfg.sensor_positions[sensor];
  return std::hypot(dx, cfg.source_offset);
}

double source_intensity(const ScenarioConfig& cfg, std::size_t sensor, double t) {
  check_sensor(cfg, sensor);
  check_time(cfg, t);
  return source_model(cfg, sensor).rate(t);
}

double integrated_source_intensity(const ScenarioConfig& cfg, std::size_t sensor) {
  check_sensor(cfg, sensor);
  return source_model(cfg, sensor).integral().value;
}

IntensityModel background_model(const ScenarioConfig& cfg, std::size_t sensor) {
  check_sensor(cfg, sensor);
  return IntensityModel::constant(cfg.background[sensor], cfg.horizon);
}

IntensityModel source_model(const ScenarioConfig& cfg, std::size_t sensor) {
  check_sensor(cfg, sensor);
  if (cfg.source_kind == SourceKind::constant) {
    return IntensityModel::constant(cfg.source_rates[sensor], cfg.horizon);
  }
  return IntensityModel::radiation_source(passing_source(cfg, sensor), cfg.horizon);
}

ScenarioConstants scenario_constants(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioConstants c;
  c.T = cfg.horizon;
  c.nu_min = std::numeric_limits<double>::infinity();
  c.nu_max = 0.0;
  c.beta_min = std::numeric_limits<double>::infinity();
  c.beta_max = 0.0;
  double B = 0.0;
  double J = 0.0;
  for (std::size_t i = 0; i < cfg.sensor_count(); ++i) {
    const auto beta = background_model(cfg, i);
    const auto nu = source_model(cfg, i);
    B += beta.integral().value;
    J += nu.integral().value;
    c.beta_min = std::min(c.beta_min, beta.rate_min());
    c.beta_max = std::max(c.beta_max, beta.rate_max());
    c.nu_min = std::min(c.nu_min, nu.rate_min());
    c.nu_max = std::max(c.nu_max, nu.rate_max());
  }
  if (cfg.nu_min_override) c.nu_min = *cfg.nu_min_override;
  if (cfg.nu_max_override) c.nu_max = *cfg.nu_max_override;
  c.B = B;
  c.J = J;
  c.log_c = std::log1p(c.nu_min / c.beta_max);
  c.log_d = std::log1p(c.nu_max / c.beta_min);
  c.C = 1.0 + c.nu_min / c.beta_max;
  c.D = 1.0 + c.nu_max / c.beta_min;
  return c;
}

ScenarioConfig truncated(const ScenarioConfig& cfg, std::size_t count) {
  if (count == 0 || count > cfg.sensor_count()) {
    throw InputError("truncated sensor count must be in [1, k]");
  }
  ScenarioConfig out = cfg;
  const auto n = static_cast<std::ptrdiff_t>(count);
  out.sensor_positions.assign(cfg.sensor_positions.begin(), cfg.sensor_positions.begin() + n);
  out.background.assign(cfg.background.begin(), cfg.background.begin() + n);
  if (cfg.source_kind == SourceKind::constant) {
    out.source_rates.assign(cfg.source_rates.begin(), cfg.source_rates.begin() + n);
  }
  return out;
}

std::vector<std::string> preset_names() { return {"paper-sec6", "toy-constant", "toy-pass"}; }

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig cfg;
  cfg.name = std::string(name);
  if (name == "paper-sec6") {
    constexpr std::size_t k = 10;
    constexpr double spacing = 11.0;
    cfg.sensor_positions = uniform_positions(k, spacing);
    // Integer profile, 8 cps at both ends and 2 cps mid-array, summing to 41.
    cfg.background = {8, 5, 4, 3, 2, 2, 2, 3, 4, 8};
    cfg.source_kind = SourceKind::radiation;
    cfg.source_x0 = -4.0;
    cfg.source_offset = kPresetOffset;
    cfg.source_speed = 17.0;
    cfg.source_strength = 506.8;
    cfg.horizon = pass_through_horizon(k, spacing, cfg.source_x0, cfg.source_speed);
    return cfg;
  }
  if (name == "toy-constant") {
    cfg.sensor_positions = uniform_positions(3, 1.0);
    cfg.background = {5, 5, 5};
    cfg.source_kind = SourceKind::constant;
    cfg.source_rates = {1, 1, 1};
    cfg.horizon = 1.0;
    return cfg;
  }
  if (name == "toy-pass") {
    // Short sharp pass: most source counts arrive within ~0.2 s of closest
    // approach, while background accrues over the whole window.
    constexpr std::size_t k = 2;
    constexpr double spacing = 10.0;
    cfg.sensor_positions = uniform_positions(k, spacing);
    cfg.background = {10, 10};
    cfg.source_kind = SourceKind::radiation;
    cfg.source_x0 = -20.0;
    cfg.source_offset = 1.0;
    cfg.source_speed = 10.0;
    cfg.source_strength = 25.0;
    cfg.horizon = pass_through_horizon(k, spacing, cfg.source_x0, cfg.source_speed);
    return cfg;
  }
  throw InputError("unknown preset '" + std::string(name) + "'");
}

std::vector<ReferenceValue> preset_reference_values(std::string_view name) {
  if (name == "paper-sec6") {
    return {
        {"T", 6.3, 0.05},
        {"B", 4387.0 / 17.0, 0.005},
        {"J", 2559.74, 0.005},
        {"C-1", 5.97e-3, 5e-5},
        {"D-1", 935.24, 0.005},
        {"gamma", 0.1718, 0.0},
        {"count_threshold_D", 338.0, 0.0},
        {"false_alarm_upper", 8.5e-7, 0.0},
    };
  }
  return {};
}

}  // namespace npfuse
