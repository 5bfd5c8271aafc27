#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "npfuse/numfmt.hpp"
#include "oracles.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = npfuse::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

double value_of(const std::string& text, const std::string& quantity) {
  for (const auto& row : csv(text)) {
    if (!row.empty() && row[0] == quantity) return npfuse::parse_double(row[1]);
  }
  ADD_FAILURE() << "no row " << quantity;
  return NAN;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("npfuse_cli_" + name);
}

}  // namespace

TEST(Cli, ScenarioReportsConstants) {
  const auto r = run({"scenario", "--preset", "paper-sec6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(value_of(r.out, "J"), 2559.74, 0.01);
  EXPECT_NEAR(value_of(r.out, "B"), 258.06, 0.01);
  EXPECT_NEAR(value_of(r.out, "T"), 6.294, 0.001);
  EXPECT_NEAR(value_of(r.out, "integrated_source_0"), 251.0, 0.05);
  EXPECT_NE(r.out.find("check:D-1,"), std::string::npos);
  EXPECT_NE(r.out.find("INCONSISTENT"), std::string::npos);
}

TEST(Cli, ScenarioJson) {
  const auto r = run({"scenario", "--preset", "paper-sec6", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["constants"]["J"].get<double>(), 2559.74, 0.01);
  bool flagged = false;
  for (const auto& c : doc["reference_checks"]) {
    if (c["quantity"] == "D-1") flagged = c["status"] == "INCONSISTENT";
  }
  EXPECT_TRUE(flagged);
}

TEST(Cli, ScenarioZeroStrengthConfig) {
  const auto path = temp("zero.json");
  {
    std::ofstream f(path);
    f << R"({"sensor_count": 3, "spacing": 11, "background": 4, "source_x0": -4,
             "source_offset": 0.36, "source_speed": 17, "source_strength": 0,
             "horizon": "pass-through"})";
  }
  const auto r = run({"scenario", "--config", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(value_of(r.out, "J"), 0.0);
  std::filesystem::remove(path);
}

TEST(Cli, UnreadableConfigIsUsageError) {
  const auto r = run({"scenario", "--config", "/nonexistent/x.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);
  EXPECT_EQ(run({"scenario"}).code, 2);
  EXPECT_EQ(run({"scenario", "--preset", "nope"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"scenario", "--preset", "toy-pass", "--format", "xml"}).code, 2);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, BoundsSingleAndSweep) {
  const auto one = run({"bounds", "--preset", "paper-sec6", "--gamma", "0.1718"});
  ASSERT_EQ(one.code, 0) << one.err;
  const auto rows = csv(one.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"k", "gamma", "count_threshold_C",
                                               "count_threshold_D", "detection_lower",
                                               "false_alarm_upper"}));
  EXPECT_EQ(rows[1][3], "338");
  const double fa = npfuse::parse_double(rows[1][5]);
  EXPECT_LT(fa, 1.7e-6);
  EXPECT_GT(fa, 4.25e-7);

  const auto sweep = run({"bounds", "--preset", "paper-sec6", "--gamma", "0.1718", "--sweep-k", "2:10"});
  ASSERT_EQ(sweep.code, 0);
  const auto srows = csv(sweep.out);
  ASSERT_EQ(srows.size(), 10u);
  for (std::size_t i = 2; i < srows.size(); ++i) {
    EXPECT_LE(npfuse::parse_double(srows[i][5]), npfuse::parse_double(srows[i - 1][5]));
  }
}

TEST(Cli, BoundsGammaToZero) {
  const auto r = run({"bounds", "--preset", "paper-sec6", "--log-gamma", "-1e300"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv(r.out);
  EXPECT_EQ(npfuse::parse_double(rows[1][4]), 1.0);
  EXPECT_EQ(npfuse::parse_double(rows[1][5]), 1.0);
}

TEST(Cli, BoundsInputErrors) {
  EXPECT_EQ(run({"bounds", "--preset", "paper-sec6", "--gamma", "0"}).code, 2);
  EXPECT_EQ(run({"bounds", "--preset", "paper-sec6", "--gamma", "-3"}).code, 2);
  EXPECT_EQ(run({"bounds", "--preset", "paper-sec6", "--alpha", "1.5"}).code, 2);
  EXPECT_EQ(run({"bounds", "--preset", "paper-sec6"}).code, 2);
  EXPECT_EQ(run({"bounds", "--preset", "paper-sec6", "--gamma", "abc"}).code, 2);
  EXPECT_EQ(run({"bounds", "--preset", "paper-sec6", "--gamma", "1", "--sweep-k", "0:3"}).code, 2);
  EXPECT_EQ(run({"bounds", "--preset", "paper-sec6", "--gamma", "1", "--sweep-k", "3"}).code, 2);
  EXPECT_EQ(run({"bounds", "--preset", "paper-sec6", "--gamma", "1", "--sweep-mode", "x"}).code, 2);
}

TEST(Cli, BoundsFromAlpha) {
  const auto r = run({"bounds", "--preset", "paper-sec6", "--alpha", "1e-6"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(csv(r.out)[1][3], "339");
}

TEST(Cli, CalibrateBound) {
  const auto r = run({"calibrate", "--preset", "paper-sec6", "--alpha", "1e-6", "--method", "bound"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][4], "339");
  EXPECT_NEAR(npfuse::parse_double(rows[1][5]), 8.5e-7, 0.01e-7);
}

TEST(Cli, CalibrateMcWarnsAndMedian) {
  const auto r = run({"calibrate", "--preset", "toy-constant", "--alpha", "0.001", "--method", "mc",
                      "--trials", "1000"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  const auto m = run({"calibrate", "--preset", "toy-pass", "--alpha", "0.5", "--method", "mc",
                      "--trials", "1001", "--format", "json"});
  ASSERT_EQ(m.code, 0);
  const auto doc = nlohmann::json::parse(m.out);
  EXPECT_NEAR(doc["empirical_pfa"].get<double>(), 0.5, 0.01);
  EXPECT_EQ(run({"calibrate", "--preset", "toy-pass", "--alpha", "0.5", "--method", "x"}).code, 2);
  EXPECT_EQ(run({"calibrate", "--preset", "toy-pass"}).code, 2);
}

TEST(Cli, SimulateCsvAndDeterminism) {
  const std::vector<std::string> args = {"simulate", "--preset", "toy-pass", "--hypothesis", "H1",
                                         "--gamma", "1", "--trials", "200", "--seed", "5"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto rows = csv(a.out);
  ASSERT_EQ(rows.size(), 201u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"trial_id", "hypothesis", "log_lr_total",
                                               "sum_counts", "decision"}));
  EXPECT_EQ(rows[1][0], "0");
  EXPECT_EQ(rows[1][1], "H1");
  EXPECT_NE(a.err.find("pd_hat="), std::string::npos);
  auto other = args;
  other.back() = "6";
  EXPECT_NE(run(other).out, a.out);
}

TEST(Cli, SimulatePfaMatchesTailOracle) {
  // toy-constant: log L = -3 + N log 1.2 with N ~ Poisson(15) under H0.
  std::int64_t n = 0;
  while (oracle::right_tail(15.0, n) > 0.05) ++n;
  const double exact = oracle::right_tail(15.0, n);
  const double lg = -3.0 + (static_cast<double>(n) - 0.5) * std::log(1.2);
  const auto r = run({"simulate", "--preset", "toy-constant", "--hypothesis", "H0", "--log-gamma",
                      npfuse::format_sig17(lg), "--trials", "100000", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  double alarms = 0.0, total = 0.0;
  while (std::getline(in, line)) {
    const auto row = nlohmann::json::parse(line);
    total += 1.0;
    if (row["decision"] == "H1") alarms += 1.0;
  }
  EXPECT_EQ(total, 100000.0);
  EXPECT_NEAR(alarms / total, exact, 3.0 * std::sqrt(exact * (1 - exact) / total));
}

TEST(Cli, SimulateErrors) {
  EXPECT_EQ(run({"simulate", "--preset", "toy-pass", "--gamma", "1", "--trials", "0"}).code, 2);
  EXPECT_EQ(run({"simulate", "--preset", "toy-pass", "--trials", "5"}).code, 2);
  EXPECT_EQ(run({"simulate", "--preset", "toy-pass", "--gamma", "1", "--hypothesis", "H3"}).code, 2);
  EXPECT_EQ(run({"simulate", "--preset", "toy-pass", "--gamma", "1", "--log-gamma", "0"}).code, 2);
}

TEST(Cli, OutFileAndManifest) {
  const auto path = temp("sim.csv");
  const std::vector<std::string> args = {"simulate", "--preset", "toy-pass", "--gamma", "1",
                                         "--trials", "50", "--out", path.string()};
  const auto a = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("summary:"), std::string::npos);
  const auto first = slurp(path);
  const auto manifest = slurp(path.string() + ".manifest");
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(slurp(path), first);
  EXPECT_EQ(slurp(path.string() + ".manifest"), manifest);
  const auto doc = nlohmann::json::parse(manifest);
  EXPECT_EQ(doc["command"], "simulate");
  EXPECT_EQ(doc["scenario"], "preset:toy-pass");
  EXPECT_EQ(doc["trials"], 50);
  EXPECT_EQ(doc["fnv1a64"].get<std::string>().size(), 16u);
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".manifest");
}

TEST(Cli, RocMonotone) {
  const auto r = run({"roc", "--preset", "toy-pass", "--trials", "2000", "--log-gamma-min", "-5",
                      "--log-gamma-max", "15", "--points", "21"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 22u);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    EXPECT_LE(npfuse::parse_double(rows[i][2]), npfuse::parse_double(rows[i - 1][2]));
    EXPECT_LE(npfuse::parse_double(rows[i][3]), npfuse::parse_double(rows[i - 1][3]));
  }
  EXPECT_EQ(run({"roc", "--preset", "toy-pass", "--points", "0"}).code, 2);
  EXPECT_EQ(run({"roc", "--preset", "toy-pass", "--log-gamma-min", "1", "--log-gamma-max", "0"}).code, 2);
}

#ifdef NPFUSE_CLI_BINARY
TEST(CliBinary, ExitCodes) {
  const std::string bin = NPFUSE_CLI_BINARY;
  EXPECT_EQ(std::system((bin + " scenario --preset paper-sec6 > /dev/null").c_str()), 0);
  const int bad = std::system((bin + " simulate --preset toy-pass --gamma 1 --trials 0 2> /dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(bad));
  EXPECT_EQ(WEXITSTATUS(bad), 2);
}
#endif
