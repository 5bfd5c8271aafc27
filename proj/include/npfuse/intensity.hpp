#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace npfuse {

enum class IntensityKind { constant, radiation_source, tabulated, custom, sum, rescaled };

/// How an integral of a rate function was obtained; recorded for audit.
enum class IntegralMethod { closed_form, quadrature };

struct Integral {
  double value = 0.0;
  IntegralMethod method = IntegralMethod::closed_form;
};

/// Straight-line constant-speed pass of a point source past a sensor on the
/// x axis. The source sits at (x0 + speed*t, offset); intensity follows the
/// inverse-square law strength / r(t)^2.
struct PassingSource {
  double sensor_x = 0.0;  // m
  double x0 = 0.0;        // m
  double offset = 1.0;    // m, closest approach, > 0
  double speed = 0.0;     // m/s
  double strength = 0.0;  // cps * m^2
};

namespace detail {
class RateFn;
}

// ============================================================================
// IntensityModel
//
// Immutable deterministic rate function on [0, horizon] (counts per second)
// with declared bounds rate_min() <= rate(t) <= rate_max(). Copies share the
// underlying function; all members are const and safe for concurrent use.
// ============================================================================
class IntensityModel {
 public:
  static IntensityModel constant(double rate, double horizon);
  static IntensityModel radiation_source(const PassingSource& source, double horizon);
  /// Piecewise-linear interpolation through (knots[i], rates[i]). knots must
  /// start at 0 and be strictly increasing; the horizon is the last knot.
  static IntensityModel tabulated(std::vector<double> knots, std::vector<double> rates);
  /// Black-box rate with caller-declared bounds. Integrals use quadrature.
  static IntensityModel custom(std::function<double(double)> rate, double rate_min,
                               double rate_max, double horizon);

  /// Rate at t. Unchecked: t is assumed to lie in [0, horizon()].
  [[nodiscard]] double rate(double t) const;
  [[nodiscard]] double operator()(double t) const { return rate(t); }

  [[nodiscard]] double rate_min() const noexcept;
  [[nodiscard]] double rate_max() const noexcept;
  [[nodiscard]] double horizon() const noexcept;
  [[nodiscard]] IntensityKind kind() const noexcept;

  /// Upper bound on rate over [a, b]; never exceeds rate_max().
  [[nodiscard]] double sup_on(double a, double b) const;

  [[nodiscard]] std::optional<double> closed_form_integral(double a, double b) const;
  /// Closed form when the model provides one, adaptive quadrature otherwise.
  [[nodiscard]] Integral integral(double a, double b) const;
  [[nodiscard]] Integral integral() const { return integral(0.0, horizon()); }

  /// True when the model is identically zero (constant 0).
  [[nodiscard]] bool is_zero() const noexcept;

  /// Grid check of rate(t) against the declared bounds; throws ModelError.
  void check_bounds(std::size_t grid_points = 10001) const;

  /// Pointwise sum; bounds add.
  friend IntensityModel operator+(const IntensityModel& a, const IntensityModel& b);

 private:
  explicit IntensityModel(std::shared_ptr<const detail::RateFn> impl);
  friend IntensityModel rescaled_rate(const IntensityModel& model, double factor);

  std::shared_ptr<const detail::RateFn> impl_;
};

/// Time-rescaled model u -> factor * rate(factor * u) on [0, horizon/factor].
/// A process with the original rate on [0, T] observed at times T*u has this
/// intensity on [0, 1] when factor = T.
IntensityModel rescaled_rate(const IntensityModel& model, double factor);

}  // namespace npfuse
