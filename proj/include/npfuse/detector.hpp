#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "npfuse/decision.hpp"
#include "npfuse/ensemble.hpp"
#include "npfuse/likelihood.hpp"
#include "npfuse/scenario.hpp"

namespace npfuse {

/// Neyman-Pearson rule on a fused statistic: H1 iff log L_T >= log gamma.
DecisionRecord decide(const FusedStatistic& fused, double log_gamma);

// ----------------------------------------------------------------------------
// Threshold calibration
// ----------------------------------------------------------------------------

/// Smallest sample-supported threshold t with #{x >= t} <= floor(alpha * n).
/// Returns just above the maximum when no alarm is allowed.
double conservative_threshold(std::vector<double> samples, double alpha);

struct ThresholdEstimate {
  double log_gamma = 0.0;
  double empirical_pfa = 0.0;  // fraction of calibration samples that alarm
  std::size_t trials = 0;
  bool reliable = true;  // false when trials < 100 / alpha
  std::string warning;
};

/// Empirical conservative (1 - alpha) quantile of log L_T under H0.
/// Throws InputError for alpha outside (0, 1) or trials < 10.
ThresholdEstimate calibrate_threshold_mc(const ScenarioConfig& cfg, double alpha,
                                         std::size_t trials, std::uint64_t seed,
                                         Execution execution = Execution::parallel);

struct BoundCalibration {
  std::int64_t count_threshold = 0;  // n*: smallest n with Pbar(B, n) <= alpha
  double log_gamma = 0.0;            // n* log D - J
  double achieved_bound = 0.0;       // Pbar(B, n*)
};

/// Threshold guaranteed by the analytic false-alarm bound.
BoundCalibration calibrate_threshold_bound(const ScenarioConstants& constants, double alpha);

// ----------------------------------------------------------------------------
// Error rates and ROC
// ----------------------------------------------------------------------------

struct ErrorEstimate {
  double pfa_hat = 0.0;
  double pd_hat = 0.0;
  std::size_t trials = 0;  // per hypothesis
  double pfa_half_width = 0.0;  // 95% normal approximation
  double pd_half_width = 0.0;
  bool normal_approximation_ok = true;  // n p >= 5 and n (1 - p) >= 5 for both
};

/// Builds an ErrorEstimate from alarm counts out of `trials` per hypothesis.
ErrorEstimate error_estimate_from_counts(std::size_t false_alarms, std::size_t detections,
                                         std::size_t trials);

/// Throws InputError for trials < 10.
ErrorEstimate estimate_error_rates(const ScenarioConfig& cfg, double log_gamma,
                                   std::size_t trials, std::uint64_t seed,
                                   Execution execution = Execution::parallel);

struct RocPoint {
  double log_gamma = 0.0;
  double pfa_hat = 0.0;
  double pd_hat = 0.0;
};

/// One simulated ensemble per hypothesis, reused at every grid point.
/// The grid must be non-empty and strictly increasing (infinities allowed).
std::vector<RocPoint> roc_curve(const ScenarioConfig& cfg, std::span<const double> log_gamma_grid,
                                std::size_t trials, std::uint64_t seed,
                                Execution execution = Execution::parallel);

/// Same, from existing samples.
std::vector<RocPoint> roc_from_samples(std::span<const TrialSample> h0,
                                       std::span<const TrialSample> h1,
                                       std::span<const double> log_gamma_grid);

}  // namespace npfuse
