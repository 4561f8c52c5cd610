#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace hdgqoi {

using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;

/// A scalar data function of position, with an optional analytic gradient.
///
/// Data functions are evaluated only at quadrature and interpolation points.
/// When no gradient is supplied, `grad` falls back to central differences.
class ScalarField {
public:
  using ValueFn = std::function<double(const Point&)>;
  using GradientFn = std::function<Vec2(const Point&)>;

  ScalarField();
  explicit ScalarField(ValueFn value, GradientFn gradient = {});

  static ScalarField constant(double c);
  static ScalarField zero() { return {}; }

  double operator()(const Point& x) const;
  Vec2 grad(const Point& x) const;

  /// Evaluate and reject non-finite values, naming the point.
  double checked(const Point& x, const char* what) const;

  bool is_zero() const { return zero_; }
  bool has_gradient() const { return static_cast<bool>(gradient_); }

  /// Pointwise c * this.
  ScalarField scaled(double c) const;

private:
  ValueFn value_;
  GradientFn gradient_;
  bool zero_ = true;
};

} // namespace hdgqoi
