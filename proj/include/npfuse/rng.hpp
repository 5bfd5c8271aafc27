#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace npfuse {

/// Identifies an independent random stream under one experiment seed.
struct StreamId {
  std::uint64_t sensor = 0;
  std::uint64_t trial = 0;
  std::uint64_t lane = 0;  // e.g. the simulated hypothesis

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

struct RngSeed {
  std::uint64_t seed = 0;
  StreamId stream;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

inline constexpr std::uint64_t kDefaultSeed = 20240601ULL;

// xoshiro256** keyed through splitmix64 by (seed, sensor, trial, lane).
// Every stream is a pure function of its RngSeed, so results do not depend on
// the order or thread in which streams are consumed.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(const RngSeed& seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Exponential with the given rate (> 0).
  double exponential(double rate);

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace npfuse
