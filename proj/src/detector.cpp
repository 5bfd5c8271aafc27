#include "npfuse/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "npfuse/bounds.hpp"
#include "npfuse/error.hpp"
#include "npfuse/network.hpp"

namespace npfuse {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << "alpha must lie in (0, 1), got " << alpha;
    throw InputError(os.str());
  }
}

void check_trials(std::size_t trials) {
  if (trials < 10) throw InputError("at least 10 trials are required");
}

std::size_t alarms(std::span<const TrialSample> samples, double log_gamma) {
  return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [&](const auto& s) {
    return decide(s.log_lr_total, log_gamma).decision == Hypothesis::H1;
  }));
}

}  // namespace

DecisionRecord decide(const FusedStatistic& fused, double log_gamma) {
  return decide(fused.log_lr_total, log_gamma);
}

double conservative_threshold(std::vector<double> samples, double alpha) {
  check_alpha(alpha);
  if (samples.empty()) throw InputError("no samples to calibrate on");
  std::sort(samples.begin(), samples.end(), std::greater<>());
  const auto allowed = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(samples.size())));
  const double above_all = std::nextafter(samples.front(), std::numeric_limits<double>::infinity());
  if (allowed == 0) return above_all;
  // Everything strictly above the (allowed+1)-th largest value may alarm; the
  // smallest sample value in that set is the threshold.
  if (allowed >= samples.size()) return samples.back();
  const double pivot = samples[allowed];
  double threshold = above_all;
  for (std::size_t i = 0; i < allowed; ++i) {
    if (samples[i] > pivot) threshold = samples[i];
  }
  return threshold;
}

ThresholdEstimate calibrate_threshold_mc(const ScenarioConfig& cfg, double alpha,
                                         std::size_t trials, std::uint64_t seed,
                                         Execution execution) {
  check_alpha(alpha);
  check_trials(trials);
  const SensorArray array(cfg);
  const auto h0 = simulate_ensemble(array, Hypothesis::H0, trials, seed, execution);
  std::vector<double> logs(h0.size());
  std::transform(h0.begin(), h0.end(), logs.begin(), [](const auto& s) { return s.log_lr_total; });

  ThresholdEstimate est;
  est.trials = trials;
  est.log_gamma = conservative_threshold(std::move(logs), alpha);
  est.empirical_pfa = static_cast<double>(alarms(h0, est.log_gamma)) / static_cast<double>(trials);
  if (static_cast<double>(trials) < 100.0 / alpha) {
    est.reliable = false;
    std::ostringstream os;
    os << "only " << trials << " trials for alpha = " << alpha << "; at least "
       << static_cast<std::uint64_t>(std::ceil(100.0 / alpha))
       << " are recommended, the estimate is unreliable";
    est.warning = os.str();
  }
  return est;
}

BoundCalibration calibrate_threshold_bound(const ScenarioConstants& constants, double alpha) {
  check_alpha(alpha);
  // Pbar(B, n) is decreasing in n: bracket, then bisect.
  std::int64_t hi = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(constants.B)));
  while (poisson_right_tail(constants.B, hi) > alpha) hi *= 2;
  std::int64_t lo = 0;  // Pbar(B, 0) = 1 > alpha
  while (hi - lo > 1) {
    const auto mid = lo + (hi - lo) / 2;
    if (poisson_right_tail(constants.B, mid) <= alpha) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  BoundCalibration out;
  out.count_threshold = hi;
  out.log_gamma = static_cast<double>(hi) * constants.log_d - constants.J;
  out.achieved_bound = false_alarm_upper_bound(constants, out.log_gamma);
  return out;
}

ErrorEstimate error_estimate_from_counts(std::size_t false_alarms, std::size_t detections,
                                         std::size_t trials) {
  ErrorEstimate e;
  e.trials = trials;
  const auto n = static_cast<double>(trials);
  e.pfa_hat = static_cast<double>(false_alarms) / n;
  e.pd_hat = static_cast<double>(detections) / n;
  e.pfa_half_width = 1.96 * std::sqrt(e.pfa_hat * (1.0 - e.pfa_hat) / n);
  e.pd_half_width = 1.96 * std::sqrt(e.pd_hat * (1.0 - e.pd_hat) / n);
  const auto ok = [n](double p) { return n * p >= 5.0 && n * (1.0 - p) >= 5.0; };
  e.normal_approximation_ok = ok(e.pfa_hat) && ok(e.pd_hat);
  return e;
}

ErrorEstimate estimate_error_rates(const ScenarioConfig& cfg, double log_gamma,
                                   std::size_t trials, std::uint64_t seed, Execution execution) {
  check_trials(trials);
  const SensorArray array(cfg);
  const auto h0 = simulate_ensemble(array, Hypothesis::H0, trials, seed, execution);
  const auto h1 = simulate_ensemble(array, Hypothesis::H1, trials, seed, execution);
  return error_estimate_from_counts(alarms(h0, log_gamma), alarms(h1, log_gamma), trials);
}

std::vector<RocPoint> roc_from_samples(std::span<const TrialSample> h0,
                                       std::span<const TrialSample> h1,
                                       std::span<const double> log_gamma_grid) {
  if (log_gamma_grid.empty()) throw InputError("ROC grid is empty");
  for (std::size_t i = 1; i < log_gamma_grid.size(); ++i) {
    if (!(log_gamma_grid[i] > log_gamma_grid[i - 1])) {
      throw InputError("ROC grid must be strictly increasing");
    }
  }
  if (h0.empty() || h1.empty()) throw InputError("ROC needs samples under both hypotheses");
  std::vector<RocPoint> out;
  out.reserve(log_gamma_grid.size());
  for (double g : log_gamma_grid) {
    out.push_back({g, static_cast<double>(alarms(h0, g)) / static_cast<double>(h0.size()),
                   static_cast<double>(alarms(h1, g)) / static_cast<double>(h1.size())});
  }
  return out;
}

std::vector<RocPoint> roc_curve(const ScenarioConfig& cfg, std::span<const double> log_gamma_grid,
                                std::size_t trials, std::uint64_t seed, Execution execution) {
  check_trials(trials);
  if (log_gamma_grid.empty()) throw InputError("ROC grid is empty");
  const SensorArray array(cfg);
  const auto h0 = simulate_ensemble(array, Hypothesis::H0, trials, seed, execution);
  const auto h1 = simulate_ensemble(array, Hypothesis::H1, trials, seed, execution);
  return roc_from_samples(h0, h1, log_gamma_grid);
}

}  // namespace npfuse
