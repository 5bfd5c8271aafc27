#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "npfuse/intensity.hpp"
#include "npfuse/rng.hpp"

namespace npfuse {

// ============================================================================
// EventPath
//
// One sensor's realized jump times on [0, T]: strictly increasing, all in
// (0, T]. A jump at exactly T is counted (right-continuity). Immutable.
// ============================================================================
class EventPath {
 public:
  /// Throws InputError unless times are strictly increasing within (0, horizon].
  EventPath(double horizon, std::vector<double> jump_times);
  explicit EventPath(double horizon) : EventPath(horizon, {}) {}

  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] std::span<const double> jump_times() const noexcept { return times_; }
  [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
  [[nodiscard]] bool empty() const noexcept { return times_.empty(); }

  friend bool operator==(const EventPath&, const EventPath&) = default;

 private:
  double horizon_;
  std::vector<double> times_;
};

/// N_t: number of jumps at or before t. Throws InputError for t outside [0, T].
std::size_t count_at(const EventPath& path, double t);

struct SamplingOptions {
  /// Uniform partition of [0, T] for piecewise thinning bounds. 0 picks
  /// automatically: one segment for flat models, 512 otherwise.
  std::size_t segments = 0;
};

/// Inhomogeneous Poisson path on [0, horizon] by thinning against the model's
/// bound on each segment. Throws ModelError if the model exceeds its bound.
EventPath sample_path(const IntensityModel& rate, double horizon, const RngSeed& seed,
                      SamplingOptions options = {});

/// Text form: "T=<seconds>" then one jump time per line, 17 significant digits.
std::string serialize_path(const EventPath& path);
/// Inverse of serialize_path; throws DecodeError.
EventPath parse_path(std::string_view text);

}  // namespace npfuse
