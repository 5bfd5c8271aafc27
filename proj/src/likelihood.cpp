#include "npfuse/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "npfuse/error.hpp"

namespace npfuse {

namespace {

bool same_horizon(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

long double log_ratio_term(const IntensityModel& background, const IntensityModel& source,
                           double t) {
  const double beta = background.rate(t);
  if (!(beta > 0.0)) {
    std::ostringstream os;
    os << "background intensity " << beta << " at t = " << t << " is not positive";
    throw ModelError(os.str());
  }
  return std::log1p(static_cast<long double>(source.rate(t)) / beta);
}

long double tree_sum(std::span<const double> v) {
  if (v.empty()) return 0.0L;
  if (v.size() == 1) return v[0];
  const auto half = v.size() / 2;
  return tree_sum(v.first(half)) + tree_sum(v.subspan(half));
}

}  // namespace

LocalStatistic local_log_lr(const EventPath& path, const IntensityModel& background,
                            const IntensityModel& source, std::size_t sensor) {
  if (!same_horizon(path.horizon(), background.horizon()) ||
      !same_horizon(path.horizon(), source.horizon())) {
    throw InputError("local_log_lr: path horizon does not match the intensity models");
  }
  LocalStatistic stat;
  stat.sensor = sensor;
  stat.count = path.size();
  const auto integral = source.integral(0.0, path.horizon());
  stat.integrated_source = integral.value;
  stat.integral_method = integral.method;

  long double acc = -static_cast<long double>(integral.value);
  for (double t : path.jump_times()) acc += log_ratio_term(background, source, t);
  stat.log_lr = static_cast<double>(acc);
  return stat;
}

double pairwise_sum(std::span<const double> values) {
  return static_cast<double>(tree_sum(values));
}

FusedStatistic fuse(std::span<const LocalStatistic> stats) {
  FusedStatistic out;
  out.per_sensor.assign(stats.begin(), stats.end());
  std::sort(out.per_sensor.begin(), out.per_sensor.end(),
            [](const auto& a, const auto& b) { return a.sensor < b.sensor; });
  for (std::size_t i = 1; i < out.per_sensor.size(); ++i) {
    if (out.per_sensor[i].sensor == out.per_sensor[i - 1].sensor) {
      throw InputError("fuse: duplicate statistic for sensor " +
                       std::to_string(out.per_sensor[i].sensor));
    }
  }
  std::vector<double> logs(out.per_sensor.size());
  std::transform(out.per_sensor.begin(), out.per_sensor.end(), logs.begin(),
                 [](const auto& s) { return s.log_lr; });
  out.log_lr_extended = tree_sum(logs);
  out.log_lr_total = static_cast<double>(out.log_lr_extended);
  return out;
}

FusedStatistic fuse(std::span<const LocalStatistic> stats, std::size_t sensor_count) {
  auto out = fuse(stats);
  if (out.per_sensor.size() != sensor_count) {
    throw InputError("fuse: expected " + std::to_string(sensor_count) + " statistics, got " +
                     std::to_string(out.per_sensor.size()));
  }
  for (std::size_t i = 0; i < sensor_count; ++i) {
    if (out.per_sensor[i].sensor != i) {
      throw InputError("fuse: missing statistic for sensor " + std::to_string(i));
    }
  }
  return out;
}

Envelope pathwise_envelope(std::span<const std::size_t> counts, const ScenarioConstants& constants) {
  const auto total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  return {-constants.J + total * constants.log_c, -constants.J + total * constants.log_d};
}

long double pooled_log_lr_extended(std::span<const EventPath> paths,
                                   std::span<const IntensityModel> backgrounds,
                                   std::span<const IntensityModel> sources) {
  if (paths.size() != backgrounds.size() || paths.size() != sources.size()) {
    throw InputError("pooled_log_lr: need one background and source model per path");
  }
  std::vector<std::pair<double, std::size_t>> events;
  long double compensator = 0.0L;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!same_horizon(paths[i].horizon(), backgrounds[i].horizon()) ||
        !same_horizon(paths[i].horizon(), sources[i].horizon())) {
      throw InputError("pooled_log_lr: path horizon does not match the intensity models");
    }
    compensator += sources[i].integral(0.0, paths[i].horizon()).value;
    for (double t : paths[i].jump_times()) events.emplace_back(t, i);
  }
  std::sort(events.begin(), events.end());
  long double acc = 0.0L;
  for (const auto& [t, i] : events) acc += log_ratio_term(backgrounds[i], sources[i], t);
  return acc - compensator;
}

double pooled_log_lr(std::span<const EventPath> paths, std::span<const IntensityModel> backgrounds,
                     std::span<const IntensityModel> sources) {
  return static_cast<double>(pooled_log_lr_extended(paths, backgrounds, sources));
}

}  // namespace npfuse
