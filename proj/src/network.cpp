#include "npfuse/network.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <set>
#include <sstream>

#include "npfuse/error.hpp"
#include "npfuse/likelihood.hpp"
#include "npfuse/numfmt.hpp"

namespace npfuse {

SensorArray::SensorArray(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  models_.reserve(cfg_.sensor_count());
  for (std::size_t i = 0; i < cfg_.sensor_count(); ++i) {
    auto beta = background_model(cfg_, i);
    auto nu = source_model(cfg_, i);
    models_.push_back(SensorModels{beta, nu, beta, beta + nu});
  }
}

// ---------------------------------------------------------------------------
// Wire format
// ---------------------------------------------------------------------------

std::string encode_report(const SensorReport& report) {
  std::string line = "v" + std::to_string(report.schema_version);
  line += '\t';
  line += std::to_string(report.sensor_id);
  line += '\t';
  line += format_sig17(report.decision_time);
  line += '\t';
  line += format_sig17(report.log_lr);
  line += '\t';
  line += std::to_string(report.count);
  line += '\n';
  return line;
}

SensorReport decode_report(std::string_view line) {
  if (line.empty() || line.back() != '\n') throw DecodeError("report line is not newline-terminated");
  line.remove_suffix(1);
  std::vector<std::string_view> fields;
  while (true) {
    const auto tab = line.find('\t');
    fields.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  if (fields.empty() || fields[0].size() < 2 || fields[0][0] != 'v') {
    throw DecodeError("report line must start with a schema version 'v<N>'");
  }
  const auto version = parse_integer(fields[0].substr(1));
  if (version != kReportSchemaVersion) {
    throw DecodeError("unknown report schema version " + std::string(fields[0]));
  }
  if (fields.size() != 5) {
    throw DecodeError("report line needs 5 tab-separated fields, got " +
                      std::to_string(fields.size()));
  }
  SensorReport r;
  const auto id = parse_integer(fields[1]);
  const auto count = parse_integer(fields[4]);
  if (id < 0 || id > static_cast<long long>(UINT32_MAX) || count < 0) {
    throw DecodeError("report sensor id or count out of range");
  }
  r.sensor_id = static_cast<std::uint32_t>(id);
  r.decision_time = parse_double(fields[2]);
  r.log_lr = parse_double(fields[3]);
  r.count = static_cast<std::uint64_t>(count);
  r.schema_version = static_cast<std::uint32_t>(version);
  return r;
}

// ---------------------------------------------------------------------------
// Nodes
// ---------------------------------------------------------------------------

RngSeed sensor_stream(const TrialSeed& seed, std::size_t sensor, Hypothesis hypothesis) {
  return RngSeed{seed.seed, StreamId{sensor, seed.trial, static_cast<std::uint64_t>(hypothesis)}};
}

EventPath sample_sensor_path(const SensorArray& array, std::size_t sensor, Hypothesis hypothesis,
                             const TrialSeed& seed) {
  const auto& m = array.sensor(sensor);
  const auto& rate = hypothesis == Hypothesis::H0 ? m.observed_h0 : m.observed_h1;
  return sample_path(rate, array.horizon(), sensor_stream(seed, sensor, hypothesis));
}

SensorReport run_sensor_node(const SensorArray& array, std::size_t sensor, Hypothesis hypothesis,
                             const TrialSeed& seed) {
  const auto path = sample_sensor_path(array, sensor, hypothesis, seed);
  const auto& m = array.sensor(sensor);
  const auto stat = local_log_lr(path, m.background, m.source, sensor);
  SensorReport r;
  r.sensor_id = static_cast<std::uint32_t>(sensor);
  r.decision_time = array.horizon();
  r.log_lr = stat.log_lr;
  r.count = stat.count;
  return r;
}

FusionSpec FusionSpec::all_sensors(const SensorArray& array) {
  FusionSpec spec;
  spec.decision_time = array.horizon();
  for (std::size_t i = 0; i < array.sensor_count(); ++i) {
    spec.sensor_ids.push_back(static_cast<std::uint32_t>(i));
  }
  return spec;
}

DecisionRecord fusion_node(std::span<const SensorReport> reports, const FusionSpec& spec,
                           double log_gamma) {
  const std::set<std::uint32_t> expected(spec.sensor_ids.begin(), spec.sensor_ids.end());
  std::set<std::uint32_t> seen;
  std::vector<LocalStatistic> stats;
  stats.reserve(reports.size());
  for (const auto& r : reports) {
    if (!expected.count(r.sensor_id)) {
      throw ProtocolError("unexpected report from sensor " + std::to_string(r.sensor_id));
    }
    if (!seen.insert(r.sensor_id).second) {
      throw ProtocolError("duplicate report from sensor " + std::to_string(r.sensor_id));
    }
    if (r.decision_time != spec.decision_time) {
      std::ostringstream os;
      os << "sensor " << r.sensor_id << " reported at T = " << r.decision_time << ", expected "
         << spec.decision_time;
      throw ProtocolError(os.str());
    }
    LocalStatistic s;
    s.sensor = r.sensor_id;
    s.log_lr = r.log_lr;
    stats.push_back(s);
  }
  if (seen.size() != expected.size()) {
    for (auto id : expected) {
      if (!seen.count(id)) throw ProtocolError("missing report from sensor " + std::to_string(id));
    }
  }
  return decide(fuse(stats).log_lr_total, log_gamma);
}

// ---------------------------------------------------------------------------
// Transports
// ---------------------------------------------------------------------------

void InProcessChannel::send(const SensorReport& report) {
  std::lock_guard lock(mutex_);
  queue_.push_back(report);
  ++sent_;
}

std::vector<SensorReport> InProcessChannel::receive(std::size_t expected) {
  std::lock_guard lock(mutex_);
  if (queue_.size() < expected) {
    throw ProtocolError("fusion expected " + std::to_string(expected) + " reports, " +
                        std::to_string(queue_.size()) + " arrived");
  }
  std::vector<SensorReport> out(queue_.begin(),
                                queue_.begin() + static_cast<std::ptrdiff_t>(expected));
  queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(expected));
  return out;
}

std::size_t InProcessChannel::messages_sent() const {
  std::lock_guard lock(mutex_);
  return sent_;
}

StreamSocketChannel::StreamSocketChannel() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
    throw ProtocolError(std::string("socketpair failed: ") + std::strerror(errno));
  }
  write_fd_ = fds[0];
  read_fd_ = fds[1];
}

StreamSocketChannel::~StreamSocketChannel() {
  if (write_fd_ >= 0) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
}

void StreamSocketChannel::send(const SensorReport& report) {
  const auto line = encode_report(report);
  std::lock_guard lock(mutex_);
  std::size_t off = 0;
  while (off < line.size()) {
    const auto n = ::write(write_fd_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("socket write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  ++sent_;
}

std::vector<SensorReport> StreamSocketChannel::receive(std::size_t expected) {
  std::vector<SensorReport> out;
  char buf[4096];
  while (out.size() < expected) {
    const auto nl = pending_.find('\n');
    if (nl != std::string::npos) {
      out.push_back(decode_report(std::string_view(pending_).substr(0, nl + 1)));
      pending_.erase(0, nl + 1);
      continue;
    }
    const auto n = ::read(read_fd_, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("socket read failed: ") + std::strerror(errno));
    }
    if (n == 0) throw ProtocolError("socket closed before all reports arrived");
    pending_.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

std::size_t StreamSocketChannel::messages_sent() const {
  std::lock_guard lock(mutex_);
  return sent_;
}

// ---------------------------------------------------------------------------
// Trial
// ---------------------------------------------------------------------------

TrialOutcome run_trial(const SensorArray& array, Hypothesis hypothesis, double log_gamma,
                       const TrialSeed& seed, const TrialOptions& options) {
  const auto start = std::chrono::steady_clock::now();

  std::unique_ptr<ReportTransport> transport;
  if (options.transport == TransportKind::stream_socket) {
    transport = std::make_unique<StreamSocketChannel>();
  } else {
    transport = std::make_unique<InProcessChannel>();
  }

  const std::set<std::uint32_t> dropped(options.dropped_sensors.begin(),
                                        options.dropped_sensors.end());
  FusionSpec spec;
  spec.decision_time = array.horizon();
  for (std::size_t i = 0; i < array.sensor_count(); ++i) {
    const auto id = static_cast<std::uint32_t>(i);
    if (!dropped.count(id)) spec.sensor_ids.push_back(id);
  }
  if (spec.sensor_ids.empty()) throw InputError("run_trial: every sensor was dropped");

  const auto active = static_cast<std::ptrdiff_t>(spec.sensor_ids.size());
  std::exception_ptr failure;
#pragma omp parallel for if (options.parallel_sensors) schedule(static)
  for (std::ptrdiff_t j = 0; j < active; ++j) {
    try {
      transport->send(run_sensor_node(array, spec.sensor_ids[static_cast<std::size_t>(j)],
                                      hypothesis, seed));
    } catch (...) {
#pragma omp critical(npfuse_trial_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  TrialOutcome out;
  out.reports = transport->receive(spec.sensor_ids.size());
  out.messages = transport->messages_sent();
  out.decision = fusion_node(out.reports, spec, log_gamma);
  out.decision.truth = hypothesis;
  out.decision.provenance = seed;
  std::sort(out.reports.begin(), out.reports.end(),
            [](const auto& a, const auto& b) { return a.sensor_id < b.sensor_id; });
  out.seed = seed;
  out.duration = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - start);
  return out;
}

}  // namespace npfuse
