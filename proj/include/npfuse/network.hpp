#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "npfuse/decision.hpp"
#include "npfuse/intensity.hpp"
#include "npfuse/poisson_sim.hpp"
#include "npfuse/rng.hpp"
#include "npfuse/scenario.hpp"

namespace npfuse {

// ============================================================================
// Sensor array
//
// Parallel architecture: k sensor nodes observe independent Poisson streams,
// each computes its own log likelihood ratio at T and sends exactly one
// SensorReport to the fusion node. The fusion node sees nothing but reports.
// ============================================================================

struct SensorModels {
  IntensityModel background;
  IntensityModel source;
  IntensityModel observed_h0;  // background
  IntensityModel observed_h1;  // background + source
};

/// A validated scenario with its per-sensor models built once. Immutable.
class SensorArray {
 public:
  explicit SensorArray(ScenarioConfig cfg);

  [[nodiscard]] const ScenarioConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] std::size_t sensor_count() const noexcept { return models_.size(); }
  [[nodiscard]] double horizon() const noexcept { return cfg_.horizon; }
  [[nodiscard]] const SensorModels& sensor(std::size_t index) const { return models_.at(index); }

 private:
  ScenarioConfig cfg_;
  std::vector<SensorModels> models_;
};

inline constexpr std::uint32_t kReportSchemaVersion = 1;

struct SensorReport {
  std::uint32_t sensor_id = 0;
  double decision_time = 0.0;
  double log_lr = 0.0;
  std::uint64_t count = 0;  // diagnostic only, never used by fusion
  std::uint32_t schema_version = kReportSchemaVersion;

  friend bool operator==(const SensorReport&, const SensorReport&) = default;
};

/// "v1\t<sensor_id>\t<T>\t<log_lr>\t<count>\n", reals with 17 significant digits.
std::string encode_report(const SensorReport& report);
/// Throws DecodeError on malformed or truncated lines and unknown versions.
SensorReport decode_report(std::string_view line);

/// Stream id of one sensor in one trial under one hypothesis.
RngSeed sensor_stream(const TrialSeed& seed, std::size_t sensor, Hypothesis hypothesis);

/// The path a sensor node observes; H0 draws from beta_i, H1 from beta_i + nu_i.
EventPath sample_sensor_path(const SensorArray& array, std::size_t sensor, Hypothesis hypothesis,
                             const TrialSeed& seed);

SensorReport run_sensor_node(const SensorArray& array, std::size_t sensor, Hypothesis hypothesis,
                             const TrialSeed& seed);

/// What the fusion node expects to receive.
struct FusionSpec {
  std::vector<std::uint32_t> sensor_ids;
  double decision_time = 0.0;

  static FusionSpec all_sensors(const SensorArray& array);
};

/// Fuses report log ratios and decides. Throws ProtocolError on a duplicate,
/// missing or unexpected sensor id, or a mismatched decision time.
DecisionRecord fusion_node(std::span<const SensorReport> reports, const FusionSpec& spec,
                           double log_gamma);

// ----------------------------------------------------------------------------
// Transport
// ----------------------------------------------------------------------------

class ReportTransport {
 public:
  virtual ~ReportTransport() = default;
  /// Called by sensor nodes, possibly concurrently.
  virtual void send(const SensorReport& report) = 0;
  /// Called by the fusion node once all nodes have sent; returns `expected`
  /// reports in arrival order.
  virtual std::vector<SensorReport> receive(std::size_t expected) = 0;
  [[nodiscard]] virtual std::size_t messages_sent() const = 0;
};

class InProcessChannel final : public ReportTransport {
 public:
  void send(const SensorReport& report) override;
  std::vector<SensorReport> receive(std::size_t expected) override;
  [[nodiscard]] std::size_t messages_sent() const override;

 private:
  mutable std::mutex mutex_;
  std::vector<SensorReport> queue_;
  std::size_t sent_ = 0;
};

/// Reports travel as encoded lines over a connected local stream socket
/// pair. Writes block once the kernel socket buffer is full, so this is
/// meant for small arrays.
class StreamSocketChannel final : public ReportTransport {
 public:
  StreamSocketChannel();
  ~StreamSocketChannel() override;
  StreamSocketChannel(const StreamSocketChannel&) = delete;
  StreamSocketChannel& operator=(const StreamSocketChannel&) = delete;

  void send(const SensorReport& report) override;
  std::vector<SensorReport> receive(std::size_t expected) override;
  [[nodiscard]] std::size_t messages_sent() const override;

 private:
  int write_fd_ = -1;
  int read_fd_ = -1;
  mutable std::mutex mutex_;
  std::size_t sent_ = 0;
  std::string pending_;
};

enum class TransportKind { in_process, stream_socket };

struct TrialOptions {
  TransportKind transport = TransportKind::in_process;
  std::vector<std::uint32_t> dropped_sensors;  // never run, never reported
  bool parallel_sensors = false;               // run nodes in an OpenMP team
};

struct TrialOutcome {
  DecisionRecord decision;
  std::vector<SensorReport> reports;  // ascending sensor id
  std::size_t messages = 0;
  std::chrono::nanoseconds duration{0};
  TrialSeed seed;
};

/// One end-to-end trial: sensor nodes, transport, fusion. Deterministic in
/// (array, hypothesis, seed) regardless of node execution order.
TrialOutcome run_trial(const SensorArray& array, Hypothesis hypothesis, double log_gamma,
                       const TrialSeed& seed, const TrialOptions& options = {});

}  // namespace npfuse
