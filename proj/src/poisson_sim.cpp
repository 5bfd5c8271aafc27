#include "npfuse/poisson_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "npfuse/error.hpp"
#include "npfuse/numfmt.hpp"

namespace npfuse {

EventPath::EventPath(double horizon, std::vector<double> jump_times)
    : horizon_(horizon), times_(std::move(jump_times)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw InputError("event path horizon must be finite and > 0");
  }
  double prev = 0.0;
  for (double t : times_) {
    if (!(t > prev) || t > horizon_) {
      std::ostringstream os;
      os << "jump times must be strictly increasing in (0, " << horizon_ << "], got " << t
         << " after " << prev;
      throw InputError(os.str());
    }
    prev = t;
  }
}

std::size_t count_at(const EventPath& path, double t) {
  if (!(t >= 0.0 && t <= path.horizon())) {
    std::ostringstream os;
    os << "count_at: t = " << t << " outside [0, " << path.horizon() << "]";
    throw InputError(os.str());
  }
  const auto times = path.jump_times();
  return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

EventPath sample_path(const IntensityModel& rate, double horizon, const RngSeed& seed,
                      SamplingOptions options) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InputError("sample_path: horizon must be finite and > 0");
  }
  if (horizon > rate.horizon() * (1.0 + 1e-12)) {
    throw InputError("sample_path: horizon exceeds the intensity model's domain");
  }
  std::vector<double> times;
  if (rate.is_zero()) return EventPath(horizon, std::move(times));

  std::size_t segments = options.segments;
  if (segments == 0) {
    const bool flat = rate.kind() == IntensityKind::constant ||
                      rate.rate_max() <= 1.25 * rate.rate_min();
    segments = flat ? 1 : 512;
  }
  times.reserve(static_cast<std::size_t>(1.2 * rate.rate_max() * horizon / 4.0) + 16);

  Rng rng(seed);
  const double declared_max = rate.rate_max();
  double last = 0.0;
  for (std::size_t s = 0; s < segments; ++s) {
    const double a = horizon * static_cast<double>(s) / static_cast<double>(segments);
    const double b =
        s + 1 == segments ? horizon : horizon * static_cast<double>(s + 1) / static_cast<double>(segments);
    const double bound = rate.sup_on(a, b);
    if (!(bound > 0.0)) continue;
    // Restarting the exponential clock at a is exact by memorylessness.
    double t = a;
    for (;;) {
      t += rng.exponential(bound);
      if (t > b) break;
      const double r = rate.rate(t);
      if (r > bound * (1.0 + 1e-12) || r > declared_max * (1.0 + 1e-12) || r < 0.0) {
        std::ostringstream os;
        os << "intensity " << r << " at t = " << t << " violates its declared bound "
           << std::min(bound, declared_max);
        throw ModelError(os.str());
      }
      if (rng.uniform() * bound < r) {
        double accepted = t;
        if (accepted <= last) {
          accepted = std::nextafter(last, std::numeric_limits<double>::infinity());
          if (accepted > horizon) continue;
        }
        times.push_back(accepted);
        last = accepted;
      }
    }
  }
  return EventPath(horizon, std::move(times));
}

std::string serialize_path(const EventPath& path) {
  std::string out = "T=" + format_sig17(path.horizon()) + "\n";
  for (double t : path.jump_times()) {
    out += format_sig17(t);
    out += '\n';
  }
  return out;
}

EventPath parse_path(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.empty() || lines.front().substr(0, 2) != "T=") {
    throw DecodeError("event path must start with 'T=<seconds>'");
  }
  const double horizon = parse_double(lines.front().substr(2));
  std::vector<double> times;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    times.push_back(parse_double(lines[i]));
  }
  try {
    return EventPath(horizon, std::move(times));
  } catch (const InputError& e) {
    throw DecodeError(e.what());
  }
}

}  // namespace npfuse
