#include "hdgqoi/fields.hpp"

#include "hdgqoi/errors.hpp"

#include <cmath>
#include <sstream>

namespace hdgqoi {

ScalarField::ScalarField()
    : value_([](const Point&) { return 0.0; }),
      gradient_([](const Point&) { return Vec2::Zero().eval(); }) {}

ScalarField::ScalarField(ValueFn value, GradientFn gradient)
    : value_(std::move(value)), gradient_(std::move(gradient)), zero_(false) {}

ScalarField ScalarField::constant(double c) {
  if (c == 0.0)
    return zero();
  return ScalarField([c](const Point&) { return c; },
                     [](const Point&) { return Vec2::Zero().eval(); });
}

double ScalarField::operator()(const Point& x) const { return value_(x); }

Vec2 ScalarField::grad(const Point& x) const {
  if (gradient_)
    return gradient_(x);
  const double h = 1e-6 * (1.0 + x.norm());
  const Vec2 ex(h, 0.0), ey(0.0, h);
  return Vec2((value_(x + ex) - value_(x - ex)) / (2 * h),
              (value_(x + ey) - value_(x - ey)) / (2 * h));
}

double ScalarField::checked(const Point& x, const char* what) const {
  const double v = value_(x);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " is not finite at (" << x.x() << ", " << x.y() << ")";
    throw EvaluationError(msg.str());
  }
  return v;
}

ScalarField ScalarField::scaled(double c) const {
  if (zero_ || c == 0.0)
    return zero();
  auto v = value_;
  auto g = gradient_;
  GradientFn sg;
  if (g)
    sg = [g, c](const Point& x) { return Vec2(c * g(x)); };
  return ScalarField([v, c](const Point& x) { return c * v(x); }, sg);
}

} // namespace hdgqoi
