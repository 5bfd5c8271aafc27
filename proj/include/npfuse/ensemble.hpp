#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "npfuse/decision.hpp"
#include "npfuse/network.hpp"

namespace npfuse {

// Monte Carlo ensembles of network trials. The serial loop is the reference;
// the OpenMP kernel must produce bit-identical samples because each trial
// draws only from its own (seed, trial, sensor, hypothesis) streams.

enum class Execution { serial, parallel };

/// Fused statistic and total count of one simulated trial.
struct TrialSample {
  double log_lr_total = 0.0;
  std::uint64_t total_count = 0;

  friend bool operator==(const TrialSample&, const TrialSample&) = default;
};

/// Trials first_trial .. first_trial + trials - 1 under one hypothesis.
std::vector<TrialSample> simulate_ensemble_serial(const SensorArray& array, Hypothesis hypothesis,
                                                  std::size_t trials, std::uint64_t seed,
                                                  std::uint64_t first_trial = 0);
std::vector<TrialSample> simulate_ensemble_parallel(const SensorArray& array,
                                                    Hypothesis hypothesis, std::size_t trials,
                                                    std::uint64_t seed,
                                                    std::uint64_t first_trial = 0);

std::vector<TrialSample> simulate_ensemble(const SensorArray& array, Hypothesis hypothesis,
                                           std::size_t trials, std::uint64_t seed,
                                           Execution execution = Execution::parallel,
                                           std::uint64_t first_trial = 0);

}  // namespace npfuse
