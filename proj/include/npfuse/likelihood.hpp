#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "npfuse/intensity.hpp"
#include "npfuse/poisson_sim.hpp"
#include "npfuse/scenario.hpp"

namespace npfuse {

/// Per-sensor log likelihood ratio of "background + source" against
/// "background only", computed from that sensor's jump times alone.
struct LocalStatistic {
  std::size_t sensor = 0;
  double log_lr = 0.0;
  std::size_t count = 0;
  double integrated_source = 0.0;  // counts
  IntegralMethod integral_method = IntegralMethod::closed_form;
};

struct FusedStatistic {
  double log_lr_total = 0.0;
  long double log_lr_extended = 0.0L;  // tree sum before rounding to double
  std::vector<LocalStatistic> per_sensor;  // ascending sensor index
};

/// log L = -int_0^T nu + sum_n log(1 + nu(tau_n) / beta(tau_n)).
/// Throws InputError on horizon mismatch, ModelError if beta(tau_n) <= 0.
LocalStatistic local_log_lr(const EventPath& path, const IntensityModel& background,
                            const IntensityModel& source, std::size_t sensor = 0);

/// Pairwise (tree) sum over values in the given order, long double partials.
double pairwise_sum(std::span<const double> values);

/// Product of the local ratios, in the log domain. Statistics are ordered by
/// sensor index before summation, so the result does not depend on arrival
/// order. Throws InputError on duplicate indices.
FusedStatistic fuse(std::span<const LocalStatistic> stats);
/// As above, and additionally requires exactly the indices 0..sensor_count-1.
FusedStatistic fuse(std::span<const LocalStatistic> stats, std::size_t sensor_count);

/// Deterministic bracket log l- <= log L_T <= log l+ from total counts.
struct Envelope {
  double log_lower = 0.0;
  double log_upper = 0.0;
};

Envelope pathwise_envelope(std::span<const std::size_t> counts, const ScenarioConstants& constants);

/// Centralized computation of log L_T directly from all raw paths, merging
/// every sensor's events into one time-ordered stream.
long double pooled_log_lr_extended(std::span<const EventPath> paths,
                                   std::span<const IntensityModel> backgrounds,
                                   std::span<const IntensityModel> sources);
double pooled_log_lr(std::span<const EventPath> paths, std::span<const IntensityModel> backgrounds,
                     std::span<const IntensityModel> sources);

}  // namespace npfuse
