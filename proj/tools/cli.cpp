#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "npfuse/bounds.hpp"
#include "npfuse/detector.hpp"
#include "npfuse/ensemble.hpp"
#include "npfuse/error.hpp"
#include "npfuse/network.hpp"
#include "npfuse/numfmt.hpp"
#include "npfuse/scenario.hpp"
#include "npfuse/scenario_io.hpp"

namespace npfuse::cli {

namespace {

using nlohmann::json;

struct Common {
  std::string preset;
  std::string config;
  std::uint64_t seed = kDefaultSeed;
  std::string format = "csv";
  std::string out;
};

struct Options {
  Common common;
  std::optional<double> gamma;
  std::optional<double> log_gamma;
  std::optional<double> alpha;
  std::size_t trials = 10000;
  std::string sweep_k;
  std::string sweep_mode = "deployment";
  std::string method = "bound";
  std::string hypothesis = "H0";
  double roc_min = -10.0;
  double roc_max = 10.0;
  std::size_t roc_points = 21;
};

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_sig17(v);
}

json num(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
}

std::string scenario_label(const Common& c) {
  return c.config.empty() ? "preset:" + c.preset : "config:" + c.config;
}

ScenarioConfig load(const Common& c) { return resolve_scenario(c.preset, c.config); }

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Writes the payload to --out (plus a manifest line next to it) or to `out`.
void emit(const std::string& command, const Options& o, const std::string& payload,
          std::ostream& out) {
  if (o.common.out.empty()) {
    out << payload;
    return;
  }
  {
    std::ofstream f(o.common.out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + o.common.out + "'");
    f << payload;
  }
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(payload);
  json manifest = {{"command", command},
                   {"scenario", scenario_label(o.common)},
                   {"seed", o.common.seed},
                   {"trials", o.trials},
                   {"format", o.common.format},
                   {"outputs", {o.common.out}},
                   {"fnv1a64", hash.str()}};
  if (o.gamma) manifest["gamma"] = *o.gamma;
  if (o.log_gamma) manifest["log_gamma"] = *o.log_gamma;
  if (o.alpha) manifest["alpha"] = *o.alpha;
  std::ofstream m(o.common.out + ".manifest", std::ios::binary);
  if (!m) throw InputError("cannot write manifest for '" + o.common.out + "'");
  m << manifest.dump() << '\n';
}

std::optional<double> threshold_from(const Options& o) {
  if (o.gamma && o.log_gamma) throw InputError("give --gamma or --log-gamma, not both");
  if (o.gamma) {
    if (!(*o.gamma > 0.0)) throw InputError("--gamma must be > 0");
    return std::log(*o.gamma);
  }
  if (o.log_gamma) {
    if (std::isnan(*o.log_gamma)) throw InputError("--log-gamma must not be NaN");
    return *o.log_gamma;
  }
  return std::nullopt;
}

void check_format(const Options& o, bool allow_text = false) {
  const auto& f = o.common.format;
  if (f != "csv" && f != "json" && !(allow_text && f == "text")) {
    throw InputError("--format must be csv or json");
  }
}

// ---------------------------------------------------------------------------
// scenario
// ---------------------------------------------------------------------------

int cmd_scenario(const Options& o, std::ostream& out) {
  check_format(o);
  const auto cfg = load(o.common);
  const auto c = scenario_constants(cfg);

  struct Row {
    std::string quantity;
    double value;
  };
  std::vector<Row> rows = {{"k", static_cast<double>(cfg.sensor_count())},
                           {"T", c.T},
                           {"B", c.B},
                           {"J", c.J},
                           {"C", c.C},
                           {"C-1", std::expm1(c.log_c)},
                           {"D", c.D},
                           {"D-1", std::expm1(c.log_d)},
                           {"nu_min", c.nu_min},
                           {"nu_max", c.nu_max},
                           {"beta_min", c.beta_min},
                           {"beta_max", c.beta_max}};
  for (std::size_t i = 0; i < cfg.sensor_count(); ++i) {
    rows.push_back({"integrated_source_" + std::to_string(i), integrated_source_intensity(cfg, i)});
  }

  // Checks against reference figures attached to a preset.
  struct Check {
    std::string quantity;
    double computed;
    double reference;
    bool consistent;
  };
  std::vector<Check> checks;
  if (o.common.config.empty()) {
    const auto refs = preset_reference_values(o.common.preset);
    std::optional<double> ref_gamma;
    for (const auto& r : refs) {
      if (r.quantity == "gamma") ref_gamma = r.value;
    }
    for (const auto& r : refs) {
      std::optional<double> computed;
      if (r.quantity == "T") computed = c.T;
      if (r.quantity == "B") computed = c.B;
      if (r.quantity == "J") computed = c.J;
      if (r.quantity == "C-1") computed = std::expm1(c.log_c);
      if (r.quantity == "D-1") computed = std::expm1(c.log_d);
      if (r.quantity == "count_threshold_D" && ref_gamma) {
        // Ceiling argument at the reference threshold.
        const double arg = (std::log(*ref_gamma) + c.J) / c.log_d;
        checks.push_back({"count_threshold_argument_D", arg, r.value,
                          static_cast<double>(count_threshold(std::log(*ref_gamma), c.J,
                                                              c.log_d)) == r.value});
        continue;
      }
      if (computed) {
        checks.push_back({r.quantity, *computed, r.value,
                          std::abs(*computed - r.value) <= r.tolerance});
      }
    }
  }

  std::ostringstream os;
  if (o.common.format == "json") {
    json doc;
    doc["scenario"] = cfg.name;
    json constants = json::object();
    for (const auto& r : rows) constants[r.quantity] = num(r.value);
    doc["constants"] = constants;
    json refs = json::array();
    for (const auto& ch : checks) {
      refs.push_back({{"quantity", ch.quantity},
                      {"computed", num(ch.computed)},
                      {"reference", num(ch.reference)},
                      {"status", ch.consistent ? "consistent" : "INCONSISTENT"}});
    }
    doc["reference_checks"] = refs;
    os << doc.dump(2) << '\n';
  } else {
    os << "quantity,value,reference,status\n";
    for (const auto& r : rows) os << r.quantity << ',' << fmt(r.value) << ",,\n";
    for (const auto& ch : checks) {
      os << "check:" << ch.quantity << ',' << fmt(ch.computed) << ',' << fmt(ch.reference) << ','
         << (ch.consistent ? "consistent" : "INCONSISTENT") << '\n';
    }
  }
  emit("scenario", o, os.str(), out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

std::pair<std::size_t, std::size_t> parse_range(const std::string& text, std::size_t k) {
  if (text.empty()) return {k, k};
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("--sweep-k expects a:b");
  try {
    const auto a = parse_integer(std::string_view(text).substr(0, colon));
    const auto b = parse_integer(std::string_view(text).substr(colon + 1));
    if (a < 1 || b < a || static_cast<std::size_t>(b) > k) {
      throw InputError("--sweep-k range must satisfy 1 <= a <= b <= " + std::to_string(k));
    }
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
  } catch (const DecodeError&) {
    throw InputError("--sweep-k expects integers a:b");
  }
}

int cmd_bounds(const Options& o, std::ostream& out) {
  check_format(o);
  const auto cfg = load(o.common);
  auto log_gamma = threshold_from(o);
  if (o.alpha) {
    if (log_gamma) throw InputError("give a threshold or --alpha, not both");
    log_gamma = calibrate_threshold_bound(scenario_constants(cfg), *o.alpha).log_gamma;
  }
  if (!log_gamma) throw InputError("bounds needs --gamma, --log-gamma or --alpha");
  SweepMode mode;
  if (o.sweep_mode == "deployment") {
    mode = SweepMode::deployment;
  } else if (o.sweep_mode == "truncate") {
    mode = SweepMode::truncate;
  } else {
    throw InputError("--sweep-mode must be deployment or truncate");
  }
  const auto [first, last] = parse_range(o.sweep_k, cfg.sensor_count());
  const auto rows = bound_sweep(cfg, *log_gamma, first, last, mode);

  std::ostringstream os;
  if (o.common.format == "json") {
    for (const auto& r : rows) {
      os << json{{"k", r.k},
                 {"gamma", num(r.bounds.gamma)},
                 {"log_gamma", num(r.bounds.log_gamma)},
                 {"count_threshold_C", r.bounds.count_threshold_C},
                 {"count_threshold_D", r.bounds.count_threshold_D},
                 {"detection_lower", num(r.bounds.detection_lower)},
                 {"false_alarm_upper", num(r.bounds.false_alarm_upper)}}
                .dump()
         << '\n';
    }
  } else {
    os << "k,gamma,count_threshold_C,count_threshold_D,detection_lower,false_alarm_upper\n";
    for (const auto& r : rows) {
      os << r.k << ',' << fmt(r.bounds.gamma) << ',' << r.bounds.count_threshold_C << ','
         << r.bounds.count_threshold_D << ',' << fmt(r.bounds.detection_lower) << ','
         << fmt(r.bounds.false_alarm_upper) << '\n';
    }
  }
  emit("bounds", o, os.str(), out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

int cmd_calibrate(const Options& o, std::ostream& out, std::ostream& err) {
  check_format(o);
  if (!o.alpha) throw InputError("calibrate needs --alpha");
  const auto cfg = load(o.common);
  json row;
  row["method"] = o.method;
  row["alpha"] = *o.alpha;
  if (o.method == "bound") {
    const auto b = calibrate_threshold_bound(scenario_constants(cfg), *o.alpha);
    row["log_gamma"] = num(b.log_gamma);
    row["gamma"] = num(std::exp(b.log_gamma));
    row["count_threshold"] = b.count_threshold;
    row["achieved_bound"] = num(b.achieved_bound);
  } else if (o.method == "mc") {
    const auto e = calibrate_threshold_mc(cfg, *o.alpha, o.trials, o.common.seed);
    row["log_gamma"] = num(e.log_gamma);
    row["gamma"] = num(std::exp(e.log_gamma));
    row["trials"] = e.trials;
    row["seed"] = o.common.seed;
    row["empirical_pfa"] = num(e.empirical_pfa);
    row["reliable"] = e.reliable;
    if (!e.reliable) err << "warning: " << e.warning << '\n';
  } else {
    throw InputError("--method must be mc or bound");
  }

  std::ostringstream os;
  if (o.common.format == "json") {
    os << row.dump() << '\n';
  } else {
    const bool bound = o.method == "bound";
    os << (bound ? "method,alpha,log_gamma,gamma,count_threshold,achieved_bound\n"
                 : "method,alpha,log_gamma,gamma,trials,seed,empirical_pfa,reliable\n");
    os << o.method << ',' << fmt(*o.alpha) << ',' << fmt(row["log_gamma"].get<double>()) << ','
       << fmt(row["gamma"].get<double>()) << ',';
    if (bound) {
      os << row["count_threshold"].get<std::int64_t>() << ','
         << fmt(row["achieved_bound"].get<double>()) << '\n';
    } else {
      os << o.trials << ',' << o.common.seed << ',' << fmt(row["empirical_pfa"].get<double>())
         << ',' << (row["reliable"].get<bool>() ? "true" : "false") << '\n';
    }
  }
  emit("calibrate", o, os.str(), out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  check_format(o);
  if (o.trials < 1) throw InputError("--trials must be >= 1");
  const auto log_gamma = threshold_from(o);
  if (!log_gamma) throw InputError("simulate needs --gamma or --log-gamma");
  const auto hypothesis = parse_hypothesis(o.hypothesis);
  const SensorArray array(load(o.common));
  const auto samples = simulate_ensemble(array, hypothesis, o.trials, o.common.seed);

  std::size_t alarms = 0;
  std::ostringstream os;
  if (o.common.format == "csv") os << "trial_id,hypothesis,log_lr_total,sum_counts,decision\n";
  for (std::size_t t = 0; t < samples.size(); ++t) {
    const auto d = decide(samples[t].log_lr_total, *log_gamma);
    if (d.decision == Hypothesis::H1) ++alarms;
    if (o.common.format == "json") {
      os << json{{"trial_id", t},
                 {"hypothesis", to_string(hypothesis)},
                 {"log_lr_total", num(samples[t].log_lr_total)},
                 {"sum_counts", samples[t].total_count},
                 {"decision", to_string(d.decision)}}
                .dump()
         << '\n';
    } else {
      os << t << ',' << to_string(hypothesis) << ',' << fmt(samples[t].log_lr_total) << ','
         << samples[t].total_count << ',' << to_string(d.decision) << '\n';
    }
  }
  emit("simulate", o, os.str(), out);

  const auto n = static_cast<double>(samples.size());
  const double rate = static_cast<double>(alarms) / n;
  const double half = 1.96 * std::sqrt(rate * (1.0 - rate) / n);
  const char* name = hypothesis == Hypothesis::H0 ? "pfa_hat" : "pd_hat";
  std::ostream& summary = o.common.out.empty() ? err : out;
  summary << "summary: trials=" << samples.size() << " alarms=" << alarms << ' ' << name << '='
          << fmt(rate) << " half_width_95=" << fmt(half)
          << (n * rate >= 5.0 && n * (1.0 - rate) >= 5.0 ? "" : " (normal approximation unreliable)")
          << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// roc
// ---------------------------------------------------------------------------

int cmd_roc(const Options& o, std::ostream& out) {
  check_format(o);
  if (o.roc_points < 1) throw InputError("--points must be >= 1");
  if (o.roc_points > 1 && !(o.roc_max > o.roc_min)) {
    throw InputError("--log-gamma-max must exceed --log-gamma-min");
  }
  std::vector<double> grid(o.roc_points);
  for (std::size_t i = 0; i < o.roc_points; ++i) {
    grid[i] = o.roc_points == 1 ? o.roc_min
                                : o.roc_min + (o.roc_max - o.roc_min) * static_cast<double>(i) /
                                                  static_cast<double>(o.roc_points - 1);
  }
  const auto points = roc_curve(load(o.common), grid, o.trials, o.common.seed);
  std::ostringstream os;
  if (o.common.format == "csv") os << "log_gamma,gamma,pfa_hat,pd_hat\n";
  for (const auto& p : points) {
    if (o.common.format == "json") {
      os << json{{"log_gamma", num(p.log_gamma)},
                 {"gamma", num(std::exp(p.log_gamma))},
                 {"pfa_hat", num(p.pfa_hat)},
                 {"pd_hat", num(p.pd_hat)}}
                .dump()
         << '\n';
    } else {
      os << fmt(p.log_gamma) << ',' << fmt(std::exp(p.log_gamma)) << ',' << fmt(p.pfa_hat) << ','
         << fmt(p.pd_hat) << '\n';
    }
  }
  emit("roc", o, os.str(), out);
  return kExitOk;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--preset", o.common.preset, "Built-in scenario (paper-sec6, toy-constant, toy-pass)");
  cmd->add_option("--config", o.common.config, "Scenario JSON file");
  cmd->add_option("--seed", o.common.seed, "Base seed")->capture_default_str();
  cmd->add_option("--format", o.common.format, "csv or json")->capture_default_str();
  cmd->add_option("--out", o.common.out, "Write output to this file (plus <file>.manifest)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized Neyman-Pearson detection of inhomogeneous Poisson sources"};
  app.require_subcommand(1);
  Options o;

  auto* scenario = app.add_subcommand("scenario", "Print scenario constants T, B, J, C, D");
  add_common(scenario, o);

  auto* bounds = app.add_subcommand("bounds", "Analytic detection / false-alarm bounds");
  add_common(bounds, o);
  bounds->add_option("--gamma", o.gamma, "Likelihood-ratio threshold (> 0)");
  bounds->add_option("--log-gamma", o.log_gamma, "Natural log of the threshold");
  bounds->add_option("--alpha", o.alpha, "Derive the threshold from the false-alarm bound");
  bounds->add_option("--sweep-k", o.sweep_k, "Sensor-count range a:b");
  bounds->add_option("--sweep-mode", o.sweep_mode, "deployment or truncate")->capture_default_str();

  auto* calibrate = app.add_subcommand("calibrate", "Threshold for a false-alarm level");
  add_common(calibrate, o);
  calibrate->add_option("--alpha", o.alpha, "Target false-alarm probability");
  calibrate->add_option("--method", o.method, "mc or bound")->capture_default_str();
  calibrate->add_option("--trials", o.trials, "Monte Carlo trials")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo network trials");
  add_common(simulate, o);
  simulate->add_option("--hypothesis", o.hypothesis, "H0 or H1")->capture_default_str();
  simulate->add_option("--gamma", o.gamma, "Likelihood-ratio threshold (> 0)");
  simulate->add_option("--log-gamma", o.log_gamma, "Natural log of the threshold");
  simulate->add_option("--trials", o.trials, "Number of trials")->capture_default_str();

  auto* roc = app.add_subcommand("roc", "Empirical ROC over a log-threshold grid");
  add_common(roc, o);
  roc->add_option("--trials", o.trials, "Trials per hypothesis")->capture_default_str();
  roc->add_option("--log-gamma-min", o.roc_min, "Grid start")->capture_default_str();
  roc->add_option("--log-gamma-max", o.roc_max, "Grid end")->capture_default_str();
  roc->add_option("--points", o.roc_points, "Grid size")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (scenario->parsed()) return cmd_scenario(o, out);
    if (bounds->parsed()) return cmd_bounds(o, out);
    if (calibrate->parsed()) return cmd_calibrate(o, out, err);
    if (simulate->parsed()) return cmd_simulate(o, out, err);
    if (roc->parsed()) return cmd_roc(o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DecodeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace npfuse::cli
