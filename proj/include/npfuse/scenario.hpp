#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "npfuse/intensity.hpp"

namespace npfuse {

enum class SourceKind { radiation, constant };

// ============================================================================
// ScenarioConfig
//
// k sensors on the x axis with constant per-sensor backgrounds beta_i, and a
// source that is either a point emitter passing at constant speed (inverse
// square law) or a constant per-sensor rate. Units: s, m, counts per second.
// Sensor indices are 0-based throughout the library.
// ============================================================================
struct ScenarioConfig {
  std::string name;
  std::vector<double> sensor_positions;  // m
  std::vector<double> background;        // cps, one per sensor

  SourceKind source_kind = SourceKind::radiation;
  double source_x0 = 0.0;        // m, source x at t = 0
  double source_offset = 1.0;    // m, distance h from the sensor line
  double source_speed = 0.0;     // m/s
  double source_strength = 0.0;  // cps * m^2 (chi * a)
  std::vector<double> source_rates;  // cps, constant kind only

  double horizon = 0.0;  // s, decision time T

  // Replace the model-derived extremes of the source rate in C and D.
  std::optional<double> nu_min_override;
  std::optional<double> nu_max_override;

  [[nodiscard]] std::size_t sensor_count() const noexcept { return sensor_positions.size(); }

  /// Throws InputError on any violated invariant.
  void validate() const;
};

/// Scenario-level constants for the analytic bounds.
struct ScenarioConstants {
  double B = 0.0;  // expected total background counts
  double J = 0.0;  // expected total source counts
  double C = 1.0;  // lower bound on 1 + nu/beta
  double D = 1.0;  // upper bound on 1 + nu/beta
  double T = 0.0;
  double log_c = 0.0;  // log1p(nu_min / beta_max), kept for precision near C = 1
  double log_d = 0.0;
  double nu_min = 0.0;
  double nu_max = 0.0;
  double beta_min = 0.0;
  double beta_max = 0.0;
};

std::vector<double> uniform_positions(std::size_t count, double spacing);

/// Time for a source starting at x0 to travel as far past the last sensor as
/// it started before the first: ((k-1)*spacing - 2*x0) / speed.
double pass_through_horizon(std::size_t count, double spacing, double x0, double speed);

double source_distance(const ScenarioConfig& cfg, std::size_t sensor, double t);
double source_intensity(const ScenarioConfig& cfg, std::size_t sensor, double t);
/// Integral of the source rate at one sensor over [0, T].
double integrated_source_intensity(const ScenarioConfig& cfg, std::size_t sensor);

IntensityModel background_model(const ScenarioConfig& cfg, std::size_t sensor);
IntensityModel source_model(const ScenarioConfig& cfg, std::size_t sensor);

ScenarioConstants scenario_constants(const ScenarioConfig& cfg);

/// The first `count` sensors of cfg with the horizon unchanged.
ScenarioConfig truncated(const ScenarioConfig& cfg, std::size_t count);

// ----------------------------------------------------------------------------
// Presets
// ----------------------------------------------------------------------------

/// Names: "paper-sec6", "toy-constant", "toy-pass".
std::vector<std::string> preset_names();
/// Throws InputError for unknown names.
ScenarioConfig preset(std::string_view name);

/// A published figure attached to a preset, used by `scenario` to report
/// agreement of the recomputed constants.
struct ReferenceValue {
  std::string quantity;  // "T", "B", "J", "C-1", "D-1", "gamma", ...
  double value = 0.0;
  double tolerance = 0.0;  // absolute
};

std::vector<ReferenceValue> preset_reference_values(std::string_view name);

}  // namespace npfuse
