#include "npfuse/ensemble.hpp"

#include <exception>

namespace npfuse {

namespace {

TrialSample one_trial(const SensorArray& array, const FusionSpec& spec, Hypothesis hypothesis,
                      const TrialSeed& seed) {
  std::vector<SensorReport> reports;
  reports.reserve(array.sensor_count());
  TrialSample sample;
  for (std::size_t i = 0; i < array.sensor_count(); ++i) {
    reports.push_back(run_sensor_node(array, i, hypothesis, seed));
    sample.total_count += reports.back().count;
  }
  sample.log_lr_total = fusion_node(reports, spec, 0.0).log_lr_total;
  return sample;
}

}  // namespace

std::vector<TrialSample> simulate_ensemble_serial(const SensorArray& array, Hypothesis hypothesis,
                                                  std::size_t trials, std::uint64_t seed,
                                                  std::uint64_t first_trial) {
  const auto spec = FusionSpec::all_sensors(array);
  std::vector<TrialSample> out(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    out[t] = one_trial(array, spec, hypothesis, TrialSeed{seed, first_trial + t});
  }
  return out;
}

std::vector<TrialSample> simulate_ensemble_parallel(const SensorArray& array,
                                                    Hypothesis hypothesis, std::size_t trials,
                                                    std::uint64_t seed,
                                                    std::uint64_t first_trial) {
  const auto spec = FusionSpec::all_sensors(array);
  std::vector<TrialSample> out(trials);
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    try {
      out[static_cast<std::size_t>(t)] =
          one_trial(array, spec, hypothesis,
                    TrialSeed{seed, first_trial + static_cast<std::uint64_t>(t)});
    } catch (...) {
#pragma omp critical(npfuse_ensemble_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<TrialSample> simulate_ensemble(const SensorArray& array, Hypothesis hypothesis,
                                           std::size_t trials, std::uint64_t seed,
                                           Execution execution, std::uint64_t first_trial) {
  return execution == Execution::serial
             ? simulate_ensemble_serial(array, hypothesis, trials, seed, first_trial)
             : simulate_ensemble_parallel(array, hypothesis, trials, seed, first_trial);
}

}  // namespace npfuse
