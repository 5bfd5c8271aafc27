#include "npfuse/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "npfuse/error.hpp"

namespace npfuse {
namespace detail {

class RateFn {
 public:
  RateFn(double rate_min, double rate_max, double horizon)
      : rate_min_(rate_min), rate_max_(rate_max), horizon_(horizon) {}
  virtual ~RateFn() = default;

  virtual double value(double t) const = 0;
  virtual double sup(double a, double b) const = 0;
  virtual std::optional<double> integral(double a, double b) const = 0;
  virtual IntensityKind kind() const noexcept = 0;
  virtual bool is_zero() const noexcept { return false; }

  double rate_min() const noexcept { return rate_min_; }
  double rate_max() const noexcept { return rate_max_; }
  double horizon() const noexcept { return horizon_; }

 private:
  double rate_min_;
  double rate_max_;
  double horizon_;
};

namespace {

void require_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InputError("intensity horizon must be finite and > 0");
  }
}

void require_bounds(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || hi < lo) {
    std::ostringstream os;
    os << "invalid intensity bounds [" << lo << ", " << hi << "]";
    throw InputError(os.str());
  }
}

class ConstantRate final : public RateFn {
 public:
  ConstantRate(double rate, double horizon) : RateFn(rate, rate, horizon), rate_(rate) {}
  double value(double) const override { return rate_; }
  double sup(double, double) const override { return rate_; }
  std::optional<double> integral(double a, double b) const override { return rate_ * (b - a); }
  IntensityKind kind() const noexcept override { return IntensityKind::constant; }
  bool is_zero() const noexcept override { return rate_ == 0.0; }

 private:
  double rate_;
};

// Distance-squared to the sensor is (x0 + v t - p)^2 + h^2; convex in t, so
// its minimum over an interval is at the clamped closest-approach time and its
// maximum at an endpoint.
class RadiationRate final : public RateFn {
 public:
  RadiationRate(const PassingSource& s, double horizon)
      : RateFn(bounds_of(s, 0.0, horizon).first, bounds_of(s, 0.0, horizon).second, horizon),
        s_(s) {}

  double value(double t) const override {
    const double dx = s_.x0 + s_.speed * t - s_.sensor_x;
    return s_.strength / (dx * dx + s_.offset * s_.offset);
  }

  double sup(double a, double b) const override { return bounds_of(s_, a, b).second; }

  std::optional<double> integral(double a, double b) const override {
    if (s_.strength == 0.0) return 0.0;
    if (s_.speed == 0.0) return value(a) * (b - a);
    const double h = s_.offset;
    const double lo = (s_.x0 + s_.speed * a - s_.sensor_x) / h;
    const double hi = (s_.x0 + s_.speed * b - s_.sensor_x) / h;
    // atan(hi) - atan(lo) without cancellation when both are near +-pi/2.
    const double diff = s_.speed * (b - a) / h;
    const double angle = std::atan2(diff, 1.0 + hi * lo);
    return s_.strength / (h * s_.speed) * angle;
  }

  IntensityKind kind() const noexcept override { return IntensityKind::radiation_source; }
  bool is_zero() const noexcept override { return s_.strength == 0.0; }

  static std::pair<double, double> bounds_of(const PassingSource& s, double a, double b) {
    if (!(s.offset > 0.0) || !std::isfinite(s.offset)) {
      throw InputError("source offset must be finite and > 0");
    }
    if (!(s.strength >= 0.0) || !std::isfinite(s.strength) || !std::isfinite(s.speed) ||
        !std::isfinite(s.x0) || !std::isfinite(s.sensor_x)) {
      throw InputError("source strength must be >= 0 and geometry finite");
    }
    const auto dist2 = [&](double t) {
      const double dx = s.x0 + s.speed * t - s.sensor_x;
      return dx * dx + s.offset * s.offset;
    };
    double t_closest = a;
    if (s.speed != 0.0) t_closest = std::clamp((s.sensor_x - s.x0) / s.speed, a, b);
    const double r2_min = dist2(t_closest);
    const double r2_max = std::max(dist2(a), dist2(b));
    return {s.strength / r2_max, s.strength / r2_min};
  }

 private:
  PassingSource s_;
};

class TabulatedRate final : public RateFn {
 public:
  TabulatedRate(std::vector<double> knots, std::vector<double> rates, double lo, double hi)
      : RateFn(lo, hi, knots.back()), knots_(std::move(knots)), rates_(std::move(rates)) {}

  double value(double t) const override {
    if (t <= knots_.front()) return rates_.front();
    if (t >= knots_.back()) return rates_.back();
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const auto j = static_cast<std::size_t>(it - knots_.begin());
    const double w = (t - knots_[j - 1]) / (knots_[j] - knots_[j - 1]);
    return rates_[j - 1] + w * (rates_[j] - rates_[j - 1]);
  }

  double sup(double a, double b) const override {
    double m = std::max(value(a), value(b));
    const auto first = std::upper_bound(knots_.begin(), knots_.end(), a);
    for (auto it = first; it != knots_.end() && *it < b; ++it) {
      m = std::max(m, rates_[static_cast<std::size_t>(it - knots_.begin())]);
    }
    return m;
  }

  // Exact trapezoid over the linear pieces.
  std::optional<double> integral(double a, double b) const override {
    double total = 0.0;
    double left = a;
    double f_left = value(a);
    const auto first = std::upper_bound(knots_.begin(), knots_.end(), a);
    for (auto it = first; it != knots_.end() && *it < b; ++it) {
      const double f = rates_[static_cast<std::size_t>(it - knots_.begin())];
      total += 0.5 * (f_left + f) * (*it - left);
      left = *it;
      f_left = f;
    }
    total += 0.5 * (f_left + value(b)) * (b - left);
    return total;
  }

  IntensityKind kind() const noexcept override { return IntensityKind::tabulated; }
  bool is_zero() const noexcept override { return rate_max() == 0.0; }

 private:
  std::vector<double> knots_;
  std::vector<double> rates_;
};

class CustomRate final : public RateFn {
 public:
  CustomRate(std::function<double(double)> fn, double lo, double hi, double horizon)
      : RateFn(lo, hi, horizon), fn_(std::move(fn)) {}
  double value(double t) const override { return fn_(t); }
  double sup(double, double) const override { return rate_max(); }
  std::optional<double> integral(double, double) const override { return std::nullopt; }
  IntensityKind kind() const noexcept override { return IntensityKind::custom; }

 private:
  std::function<double(double)> fn_;
};

class SumRate final : public RateFn {
 public:
  SumRate(std::shared_ptr<const RateFn> a, std::shared_ptr<const RateFn> b)
      : RateFn(a->rate_min() + b->rate_min(), a->rate_max() + b->rate_max(), a->horizon()),
        a_(std::move(a)),
        b_(std::move(b)) {}
  double value(double t) const override { return a_->value(t) + b_->value(t); }
  double sup(double lo, double hi) const override { return a_->sup(lo, hi) + b_->sup(lo, hi); }
  std::optional<double> integral(double lo, double hi) const override {
    auto x = a_->integral(lo, hi);
    auto y = b_->integral(lo, hi);
    if (!x || !y) return std::nullopt;
    return *x + *y;
  }
  IntensityKind kind() const noexcept override { return IntensityKind::sum; }
  bool is_zero() const noexcept override { return a_->is_zero() && b_->is_zero(); }

 private:
  std::shared_ptr<const RateFn> a_;
  std::shared_ptr<const RateFn> b_;
};

class RescaledRate final : public RateFn {
 public:
  RescaledRate(std::shared_ptr<const RateFn> base, double factor)
      : RateFn(factor * base->rate_min(), factor * base->rate_max(), base->horizon() / factor),
        base_(std::move(base)),
        factor_(factor) {}
  double value(double u) const override { return factor_ * base_->value(factor_ * u); }
  double sup(double a, double b) const override {
    return factor_ * base_->sup(factor_ * a, factor_ * b);
  }
  // Change of variables s = factor * u.
  std::optional<double> integral(double a, double b) const override {
    return base_->integral(factor_ * a, factor_ * b);
  }
  IntensityKind kind() const noexcept override { return IntensityKind::rescaled; }
  bool is_zero() const noexcept override { return base_->is_zero(); }

 private:
  std::shared_ptr<const RateFn> base_;
  double factor_;
};

}  // namespace
}  // namespace detail

IntensityModel::IntensityModel(std::shared_ptr<const detail::RateFn> impl)
    : impl_(std::move(impl)) {}

IntensityModel IntensityModel::constant(double rate, double horizon) {
  detail::require_horizon(horizon);
  detail::require_bounds(rate, rate);
  return IntensityModel(std::make_shared<detail::ConstantRate>(rate, horizon));
}

IntensityModel IntensityModel::radiation_source(const PassingSource& source, double horizon) {
  detail::require_horizon(horizon);
  return IntensityModel(std::make_shared<detail::RadiationRate>(source, horizon));
}

IntensityModel IntensityModel::tabulated(std::vector<double> knots, std::vector<double> rates) {
  if (knots.size() < 2 || knots.size() != rates.size()) {
    throw InputError("tabulated intensity needs >= 2 knots and one rate per knot");
  }
  if (knots.front() != 0.0) throw InputError("tabulated intensity must start at t = 0");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i] > knots[i - 1]) || !std::isfinite(knots[i])) {
      throw InputError("tabulated knots must be finite and strictly increasing");
    }
  }
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  detail::require_bounds(*lo, *hi);
  const double rmin = *lo;
  const double rmax = *hi;
  return IntensityModel(
      std::make_shared<detail::TabulatedRate>(std::move(knots), std::move(rates), rmin, rmax));
}

IntensityModel IntensityModel::custom(std::function<double(double)> rate, double rate_min,
                                      double rate_max, double horizon) {
  detail::require_horizon(horizon);
  detail::require_bounds(rate_min, rate_max);
  if (!rate) throw InputError("custom intensity needs a callable");
  return IntensityModel(
      std::make_shared<detail::CustomRate>(std::move(rate), rate_min, rate_max, horizon));
}

double IntensityModel::rate(double t) const { return impl_->value(t); }
double IntensityModel::rate_min() const noexcept { return impl_->rate_min(); }
double IntensityModel::rate_max() const noexcept { return impl_->rate_max(); }
double IntensityModel::horizon() const noexcept { return impl_->horizon(); }
IntensityKind IntensityModel::kind() const noexcept { return impl_->kind(); }
bool IntensityModel::is_zero() const noexcept { return impl_->is_zero(); }

double IntensityModel::sup_on(double a, double b) const {
  return std::min(impl_->sup(a, b), impl_->rate_max());
}

std::optional<double> IntensityModel::closed_form_integral(double a, double b) const {
  return impl_->integral(a, b);
}

Integral IntensityModel::integral(double a, double b) const {
  if (auto v = impl_->integral(a, b)) return {*v, IntegralMethod::closed_form};
  if (a == b) return {0.0, IntegralMethod::quadrature};
  const auto f = [this](double t) { return impl_->value(t); };
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13, &err);
  return {v, IntegralMethod::quadrature};
}

void IntensityModel::check_bounds(std::size_t grid_points) const {
  if (grid_points < 2) grid_points = 2;
  const double T = horizon();
  const double slack = 1e-12 * std::max(1.0, rate_max());
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double r = rate(t);
    if (!(r >= rate_min() - slack && r <= rate_max() + slack)) {
      std::ostringstream os;
      os << "rate(" << t << ") = " << r << " outside declared bounds [" << rate_min() << ", "
         << rate_max() << "]";
      throw ModelError(os.str());
    }
  }
}

IntensityModel operator+(const IntensityModel& a, const IntensityModel& b) {
  if (a.horizon() != b.horizon()) throw InputError("cannot add intensities with different horizons");
  return IntensityModel(std::make_shared<detail::SumRate>(a.impl_, b.impl_));
}

IntensityModel rescaled_rate(const IntensityModel& model, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw InputError("rescale factor must be > 0");
  if (factor == 1.0) return model;
  return IntensityModel(std::make_shared<detail::RescaledRate>(model.impl_, factor));
}

}  // namespace npfuse
