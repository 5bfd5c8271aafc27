#include "npfuse/bounds.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "npfuse/error.hpp"

namespace npfuse {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    std::ostringstream os;
    os << "Poisson mean must be finite and > 0, got " << lambda;
    throw InputError(os.str());
  }
}

void check_count(std::int64_t n) {
  if (n < 0) throw InputError("Poisson count argument must be >= 0");
}

// log(n!) - log(sqrt(2 pi n) (n/e)^n)
double stirlerr(double n) {
  constexpr double S0 = 1.0 / 12.0;
  constexpr double S1 = 1.0 / 360.0;
  constexpr double S2 = 1.0 / 1260.0;
  constexpr double S3 = 1.0 / 1680.0;
  constexpr double S4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    const long double ln = n;
    return static_cast<double>(std::lgamma(ln + 1.0L) - (ln + 0.5L) * std::log(ln) + ln -
                               0.5L * std::log(2.0L * std::numbers::pi_v<long double>));
  }
  const double nn = n * n;
  if (n > 500) return (S0 - S1 / nn) / n;
  if (n > 80) return (S0 - (S1 - S2 / nn) / nn) / n;
  if (n > 35) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
  return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / np) + np - x, without cancellation for x near np.
double bd0(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

double log_pmf_unchecked(double lambda, double j) {
  if (j == 0.0) return -lambda;
  return -stirlerr(j) - bd0(j, lambda) - 0.5 * std::log(2.0 * std::numbers::pi * j);
}

struct Tails {
  double left;   // P(lambda, n - 1)
  double right;  // Pbar(lambda, n)
};

constexpr int kMaxIterations = 100'000'000;

// Series for the regularized lower incomplete gamma P(n, lambda), lambda < n + 1.
double right_tail_series(double lambda, double n) {
  double sum = 1.0;
  double term = 1.0;
  for (int i = 1; i < kMaxIterations; ++i) {
    term *= lambda / (n + i);
    sum += term;
    if (term < sum * 1e-17) return std::exp(log_pmf_unchecked(lambda, n) + std::log(sum));
  }
  throw ModelError("Poisson right-tail series did not converge");
}

// Lentz continued fraction for the regularized upper incomplete gamma
// Q(n, lambda) = P(lambda, n - 1), lambda >= n + 1.
double left_tail_fraction(double lambda, double n) {
  constexpr double tiny = 1e-300;
  double b = lambda + 1.0 - n;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - n);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      // e^-lambda lambda^n / Gamma(n) = lambda * p(lambda, n - 1)
      return std::exp(std::log(lambda) + log_pmf_unchecked(lambda, n - 1.0) + std::log(h));
    }
  }
  throw ModelError("Poisson left-tail continued fraction did not converge");
}

// The side closer to zero is computed directly, the other as its complement.
Tails tails(double lambda, std::int64_t n) {
  if (n == 0) return {0.0, 1.0};
  if (n == kUnreachableCount) return {1.0, 0.0};
  const auto nd = static_cast<double>(n);
  if (lambda < nd + 1.0) {
    const double right = right_tail_series(lambda, nd);
    return {1.0 - right, right};
  }
  const double left = left_tail_fraction(lambda, nd);
  return {left, 1.0 - left};
}

}  // namespace

double poisson_log_pmf(double lambda, std::int64_t j) {
  check_lambda(lambda);
  check_count(j);
  return log_pmf_unchecked(lambda, static_cast<double>(j));
}

double poisson_pmf(double lambda, std::int64_t j) { return std::exp(poisson_log_pmf(lambda, j)); }

double poisson_left_tail(double lambda, std::int64_t n) {
  check_lambda(lambda);
  check_count(n);
  if (n == kUnreachableCount) return 1.0;
  return tails(lambda, n + 1).left;
}

double poisson_right_tail(double lambda, std::int64_t n) {
  check_lambda(lambda);
  check_count(n);
  return tails(lambda, n).right;
}

std::int64_t count_threshold(double log_gamma, double J, double log_ratio) {
  const double numerator = log_gamma + J;
  if (std::isnan(numerator)) throw InputError("threshold argument is NaN");
  if (!(log_ratio > 0.0)) return numerator > 0.0 ? kUnreachableCount : 0;
  const double x = numerator / log_ratio;
  if (!(x > 0.0)) return 0;
  if (x >= 9.0e18) return kUnreachableCount;
  const double nearest = std::nearbyint(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::ceil(x));
}

double detection_lower_bound(const ScenarioConstants& constants, double log_gamma) {
  const auto n = count_threshold(log_gamma, constants.J, constants.log_c);
  if (n == 0) return 1.0;
  return poisson_right_tail(constants.J + constants.B, n);
}

double false_alarm_upper_bound(const ScenarioConstants& constants, double log_gamma) {
  const auto n = count_threshold(log_gamma, constants.J, constants.log_d);
  if (n == 0) return 1.0;
  return poisson_right_tail(constants.B, n);
}

BoundSummary bound_summary(const ScenarioConstants& constants, double log_gamma) {
  BoundSummary s;
  s.log_gamma = log_gamma;
  s.gamma = std::exp(log_gamma);
  s.count_threshold_C = count_threshold(log_gamma, constants.J, constants.log_c);
  s.count_threshold_D = count_threshold(log_gamma, constants.J, constants.log_d);
  s.detection_lower = detection_lower_bound(constants, log_gamma);
  s.false_alarm_upper = false_alarm_upper_bound(constants, log_gamma);
  return s;
}

std::vector<SweepRow> bound_sweep(const ScenarioConfig& cfg, double log_gamma, std::size_t first,
                                  std::size_t last, SweepMode mode) {
  if (first < 1 || first > last || last > cfg.sensor_count()) {
    throw InputError("sensor sweep range must satisfy 1 <= a <= b <= k");
  }
  const auto full = scenario_constants(cfg);
  std::vector<SweepRow> rows;
  for (std::size_t k = first; k <= last; ++k) {
    const auto sub = scenario_constants(truncated(cfg, k));
    SweepRow row{k, bound_summary(sub, log_gamma)};
    if (mode == SweepMode::deployment) {
      auto fa = sub;
      fa.B = full.B;
      fa.D = full.D;
      fa.log_d = full.log_d;
      row.bounds.count_threshold_D = count_threshold(log_gamma, fa.J, fa.log_d);
      row.bounds.false_alarm_upper = false_alarm_upper_bound(fa, log_gamma);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace npfuse
