#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace npfuse {

enum class Hypothesis : std::uint8_t { H0 = 0, H1 = 1 };

std::string_view to_string(Hypothesis h);
/// Accepts "H0"/"h0"/"0" and "H1"/"h1"/"1"; throws InputError otherwise.
Hypothesis parse_hypothesis(std::string_view text);

/// Base seed plus trial index; sensor streams derive from it.
struct TrialSeed {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;

  friend bool operator==(const TrialSeed&, const TrialSeed&) = default;
};

struct DecisionRecord {
  double log_lr_total = 0.0;
  double log_gamma = 0.0;
  Hypothesis decision = Hypothesis::H0;
  std::optional<Hypothesis> truth;
  std::optional<TrialSeed> provenance;

  friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

/// H1 iff log_lr_total >= log_gamma (a tie alarms).
DecisionRecord decide(double log_lr_total, double log_gamma);

}  // namespace npfuse
