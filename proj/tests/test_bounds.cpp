#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "npfuse/bounds.hpp"
#include "npfuse/error.hpp"
#include "npfuse/scenario.hpp"
#include "oracles.hpp"

using namespace npfuse;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(PoissonPmf, Values) {
  EXPECT_NEAR(poisson_pmf(1.0, 0), std::exp(-1.0), 1e-16);
  EXPECT_NEAR(poisson_pmf(5.0, 5), std::exp(-5.0) * 3125.0 / 120.0, 1e-15);
  EXPECT_NEAR(poisson_pmf(5.0, 5), 0.175467, 1e-6);
  const double lambda = 4387.0 / 17.0;
  EXPECT_LT(rel(poisson_pmf(lambda, 258), oracle::pmf(lambda, 258)), 1e-13);
  for (std::int64_t j : {0, 1, 10, 100, 1000, 100000}) {
    for (double l : {1e-3, 0.5, 7.0, 250.0, 3000.0}) {
      const double want = oracle::pmf(l, j);
      if (want < 1e-300) continue;
      EXPECT_LT(rel(poisson_pmf(l, j), want), 1e-12) << l << " " << j;
      EXPECT_NEAR(poisson_log_pmf(l, j), std::log(want), 1e-11 * std::max(1.0, std::abs(std::log(want))));
    }
  }
}

TEST(PoissonPmf, Errors) {
  EXPECT_THROW(poisson_pmf(0.0, 1), InputError);
  EXPECT_THROW(poisson_pmf(-1.0, 1), InputError);
  EXPECT_THROW(poisson_pmf(kInf, 1), InputError);
  EXPECT_THROW(poisson_pmf(1.0, -1), InputError);
  EXPECT_THROW(poisson_right_tail(NAN, 1), InputError);
  EXPECT_THROW(poisson_left_tail(1.0, -1), InputError);
}

TEST(PoissonTails, Examples) {
  EXPECT_DOUBLE_EQ(poisson_right_tail(3.7, 0), 1.0);
  EXPECT_NEAR(poisson_right_tail(1.0, 2), 1.0 - 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(poisson_left_tail(1.0, 1), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(poisson_left_tail(1.0, 200), 1.0, 1e-12);
  EXPECT_NEAR(poisson_left_tail(5.0, 0), std::exp(-5.0), 1e-17);
}

TEST(PoissonTails, AgreeWithHighPrecisionOracle) {
  const std::pair<double, std::int64_t> cases[] = {
      {0.1, 1},     {0.1, 5},      {1.0, 3},       {2.5, 0},        {5.0, 5},
      {5.0, 15},    {15.0, 8},     {15.0, 25},     {30.0, 60},      {100.0, 80},
      {100.0, 140}, {258.0, 300},  {4387.0 / 17.0, 338}, {4387.0 / 17.0, 339},
      {4387.0 / 17.0, 200}, {1000.0, 1100}, {2817.8, 2700}, {2817.8, 3000},
      {50.0, 200},  {1e4, 1e4}};
  for (const auto& [lambda, n] : cases) {
    const double right = oracle::right_tail(lambda, n);
    EXPECT_LT(rel(poisson_right_tail(lambda, n), right), 1e-9) << lambda << " " << n;
    const double left = oracle::left_tail(lambda, n);
    EXPECT_LT(rel(poisson_left_tail(lambda, n), left), 1e-9) << lambda << " " << n;
  }
}

TEST(PoissonTails, ComplementAndMonotone) {
  for (double lambda : {0.7, 12.0, 258.06, 2000.0}) {
    double prev = 1.0;
    for (std::int64_t n = 0; n < static_cast<std::int64_t>(3 * lambda) + 10; n += 3) {
      const double r = poisson_right_tail(lambda, n);
      EXPECT_LE(r, prev);
      prev = r;
      if (n > 0) EXPECT_NEAR(poisson_left_tail(lambda, n - 1) + r, 1.0, 1e-13);
    }
  }
}

TEST(PoissonTails, DeepTailsStayPositive) {
  EXPECT_GT(poisson_right_tail(2817.8, 429768), 0.0 - 1.0);
  EXPECT_LT(poisson_right_tail(2817.8, 429768), 1e-300);
  const double tiny = poisson_right_tail(10.0, 100);
  EXPECT_LT(rel(tiny, oracle::right_tail(10.0, 100)), 1e-9);
}

TEST(CountThreshold, CeilingAndSnapping) {
  EXPECT_EQ(count_threshold(0.0, 2.5, 1.0), 3);
  EXPECT_EQ(count_threshold(0.0, 3.0, 1.0), 3);
  EXPECT_EQ(count_threshold(0.0, 3.0 + 1e-12, 1.0), 3);
  EXPECT_EQ(count_threshold(0.0, 3.0 + 1e-6, 1.0), 4);
  EXPECT_EQ(count_threshold(-10.0, 3.0, 1.0), 0);
  EXPECT_EQ(count_threshold(-kInf, 3.0, 1.0), 0);
  EXPECT_EQ(count_threshold(kInf, 3.0, 1.0), kUnreachableCount);
  EXPECT_EQ(count_threshold(1.0, 3.0, 0.0), kUnreachableCount);
  EXPECT_EQ(count_threshold(-5.0, 3.0, 0.0), 0);
  EXPECT_THROW(count_threshold(NAN, 1.0, 1.0), InputError);
}

TEST(Bounds, Sec6) {
  const auto c = scenario_constants(preset("paper-sec6"));
  const double lg = std::log(0.1718);
  const auto s = bound_summary(c, lg);
  EXPECT_EQ(s.count_threshold_D, 338);
  EXPECT_NEAR((lg + c.J) / c.log_d, 338.0, 0.5);
  EXPECT_LT(rel(s.false_alarm_upper, oracle::right_tail(c.B, 338)), 1e-9);
  EXPECT_LT(s.false_alarm_upper, 2.0 * 8.5e-7);
  EXPECT_GT(s.false_alarm_upper, 8.5e-7 / 2.0);
  EXPECT_LE(s.detection_lower, 1e-30);
  EXPECT_EQ(s.count_threshold_C, count_threshold(lg, c.J, c.log_c));
  EXPECT_NEAR(static_cast<double>(s.count_threshold_C), 429700.0, 200.0);
  EXPECT_NEAR(s.gamma, 0.1718, 1e-15);
}

TEST(Bounds, GammaToZeroGivesOne) {
  for (const auto& name : preset_names()) {
    const auto c = scenario_constants(preset(name));
    EXPECT_EQ(detection_lower_bound(c, -kInf), 1.0);
    EXPECT_EQ(false_alarm_upper_bound(c, -kInf), 1.0);
    EXPECT_EQ(false_alarm_upper_bound(c, -1e6), 1.0);
  }
}

TEST(Bounds, ExactForConstantRates) {
  // With C = D the statistic is a function of the total count, so both bounds
  // are the exact error probabilities of the count threshold test.
  const auto c = scenario_constants(preset("toy-constant"));
  for (std::int64_t n = 0; n < 40; ++n) {
    const double lg = -c.J + (static_cast<double>(n) - 0.5) * c.log_d;
    EXPECT_EQ(count_threshold(lg, c.J, c.log_d), n);
    EXPECT_NEAR(false_alarm_upper_bound(c, lg), oracle::right_tail(c.B, n), 1e-12);
    EXPECT_NEAR(detection_lower_bound(c, lg), oracle::right_tail(c.B + c.J, n), 1e-12);
  }
}

TEST(Sweep, DeploymentIsMonotone) {
  const auto cfg = preset("paper-sec6");
  const auto rows = bound_sweep(cfg, std::log(0.1718), 1, 10);
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].k, i + 1);
    EXPECT_LE(rows[i].bounds.false_alarm_upper, rows[i - 1].bounds.false_alarm_upper);
  }
  EXPECT_LE(rows[7].bounds.false_alarm_upper, 0.25);
  EXPECT_EQ(rows[9].bounds.count_threshold_D, 338);
  EXPECT_EQ(rows[9].bounds.false_alarm_upper,
            false_alarm_upper_bound(scenario_constants(cfg), std::log(0.1718)));
}

TEST(Sweep, TruncateRecomputesEverything) {
  const auto cfg = preset("paper-sec6");
  const auto rows = bound_sweep(cfg, std::log(0.1718), 3, 5, SweepMode::truncate);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    const auto c = scenario_constants(truncated(cfg, r.k));
    EXPECT_EQ(r.bounds.false_alarm_upper, false_alarm_upper_bound(c, std::log(0.1718)));
    EXPECT_EQ(r.bounds.detection_lower, detection_lower_bound(c, std::log(0.1718)));
  }
}

TEST(Sweep, RangeErrors) {
  const auto cfg = preset("paper-sec6");
  EXPECT_THROW(bound_sweep(cfg, 0.0, 0, 3), InputError);
  EXPECT_THROW(bound_sweep(cfg, 0.0, 4, 3), InputError);
  EXPECT_THROW(bound_sweep(cfg, 0.0, 1, 11), InputError);
}

TEST(NeymanPearson, LrRegionDominatesEnumeratedTests) {
  // Two sensors with constant rates and different ratios; observations are
  // the count pair. Exact probabilities by enumeration on a truncated grid.
  const double b1 = 5.0, n1 = 1.0, b2 = 2.0, n2 = 3.0;
  const int K = 30;
  struct Cell {
    double llr, p0, p1;
  };
  std::vector<Cell> cells;
  for (int a = 0; a <= K; ++a) {
    for (int b = 0; b <= K; ++b) {
      const double llr = -(n1 + n2) + a * std::log1p(n1 / b1) + b * std::log1p(n2 / b2);
      cells.push_back({llr, poisson_pmf(b1, a) * poisson_pmf(b2, b),
                       poisson_pmf(b1 + n1, a) * poisson_pmf(b2 + n2, b)});
    }
  }
  auto np_power_at = [&](double size) {
    // Best deterministic LR region with size <= `size`.
    auto sorted = cells;
    std::sort(sorted.begin(), sorted.end(), [](const Cell& x, const Cell& y) { return x.llr > y.llr; });
    double p0 = 0.0, p1 = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      double d0 = 0.0, d1 = 0.0;
      while (j < sorted.size() && sorted[j].llr == sorted[i].llr) {
        d0 += sorted[j].p0;
        d1 += sorted[j].p1;
        ++j;
      }
      if (p0 + d0 > size) {
        // Randomize on the boundary level set.
        p1 += d1 * (size - p0) / d0;
        break;
      }
      p0 += d0;
      p1 += d1;
      i = j;
    }
    return p1;
  };
  // Competing tests: total count, and each sensor alone.
  for (int c = 0; c <= 2 * K; ++c) {
    double p0 = 0.0, p1 = 0.0, q0 = 0.0, q1 = 0.0;
    for (int a = 0; a <= K; ++a) {
      for (int b = 0; b <= K; ++b) {
        const auto& cell = cells[static_cast<std::size_t>(a * (K + 1) + b)];
        if (a + b >= c) {
          p0 += cell.p0;
          p1 += cell.p1;
        }
        if (a >= c) {
          q0 += cell.p0;
          q1 += cell.p1;
        }
      }
    }
    EXPECT_LE(p1, np_power_at(p0) + 1e-12) << "total count >= " << c;
    EXPECT_LE(q1, np_power_at(q0) + 1e-12) << "sensor one >= " << c;
  }
}
