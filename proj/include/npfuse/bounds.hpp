#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "npfuse/scenario.hpp"

namespace npfuse {

// Poisson probabilities. All functions throw InputError unless lambda > 0
// (finite) and the count argument is >= 0.

/// p(lambda, j) = e^-lambda lambda^j / j!, via the saddle-point form
/// exp(-stirlerr(j) - bd0(j, lambda)) / sqrt(2 pi j).
double poisson_pmf(double lambda, std::int64_t j);
double poisson_log_pmf(double lambda, std::int64_t j);

/// P(lambda, n) = sum_{j <= n} p(lambda, j).
double poisson_left_tail(double lambda, std::int64_t n);
/// Pbar(lambda, n) = sum_{j >= n} p(lambda, j); equals 1 for n = 0.
double poisson_right_tail(double lambda, std::int64_t n);

/// Threshold that never fires: the count argument when the log ratio bound
/// is 0 and log(gamma) + J > 0.
inline constexpr std::int64_t kUnreachableCount = std::numeric_limits<std::int64_t>::max();

/// max(0, ceil((log_gamma + J) / log_ratio)). Arguments within 1e-9 relative
/// of an integer m map to m.
std::int64_t count_threshold(double log_gamma, double J, double log_ratio);

/// Pbar(J + B, ceil((log gamma + J) / log C)) <= P1(L_T >= gamma).
double detection_lower_bound(const ScenarioConstants& constants, double log_gamma);
/// Pbar(B, ceil((log gamma + J) / log D)) >= P0(L_T >= gamma).
double false_alarm_upper_bound(const ScenarioConstants& constants, double log_gamma);

struct BoundSummary {
  double log_gamma = 0.0;
  double gamma = 0.0;
  std::int64_t count_threshold_C = 0;
  std::int64_t count_threshold_D = 0;
  double detection_lower = 0.0;
  double false_alarm_upper = 0.0;
};

BoundSummary bound_summary(const ScenarioConstants& constants, double log_gamma);

enum class SweepMode {
  // Fixed deployment: T, B and D of the full array; J (and every constant of
  // the detection bound) from the first k sensors. Upper-bounds the false
  // alarm probability of every k-sensor subset.
  deployment,
  // Every constant recomputed for the first k sensors.
  truncate,
};

struct SweepRow {
  std::size_t k = 0;
  BoundSummary bounds;
};

/// Bounds at a fixed threshold for arrays made of the first k sensors,
/// k = first..last (inclusive).
std::vector<SweepRow> bound_sweep(const ScenarioConfig& cfg, double log_gamma, std::size_t first,
                                  std::size_t last, SweepMode mode = SweepMode::deployment);

}  // namespace npfuse
