#pragma once

// Shared helpers for the test suites: seeded generators, an exact polynomial
// oracle on the unit square and an independent conformity checker.

#include "hdgqoi/builtin_meshes.hpp"
#include "hdgqoi/hdg.hpp"
#include "hdgqoi/mesh.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testing {

/// Relative comparison; doctest's Approx adds an absolute floor of epsilon.
inline doctest::Approx rel(double value, double epsilon = 1e-9) {
  return doctest::Approx(value).epsilon(epsilon).scale(1e-300);
}

using hdgqoi::Point;
using hdgqoi::Vec2;

class Gen {
public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform(0, 1) < p; }

  std::vector<int> subset(int n, double p) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
      if (coin(p))
        out.push_back(i);
    return out;
  }

private:
  std::mt19937_64 rng_;
};

/// Polynomial in monomial form, c[(a, b)] x^a y^b.
struct Poly {
  std::map<std::pair<int, int>, double> c;

  int degree() const {
    int d = 0;
    for (const auto& [e, v] : c)
      if (v != 0)
        d = std::max(d, e.first + e.second);
    return d;
  }

  double operator()(const Point& x) const {
    double s = 0;
    for (const auto& [e, v] : c)
      s += v * std::pow(x.x(), e.first) * std::pow(x.y(), e.second);
    return s;
  }

  Poly dx() const {
    Poly r;
    for (const auto& [e, v] : c)
      if (e.first > 0)
        r.c[{e.first - 1, e.second}] += v * e.first;
    return r;
  }
  Poly dy() const {
    Poly r;
    for (const auto& [e, v] : c)
      if (e.second > 0)
        r.c[{e.first, e.second - 1}] += v * e.second;
    return r;
  }
  Poly scaled(double s) const {
    Poly r = *this;
    for (auto& [e, v] : r.c)
      v *= s;
    return r;
  }
  Poly operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, v] : o.c)
      r.c[e] += v;
    return r;
  }
  Poly operator*(const Poly& o) const {
    Poly r;
    for (const auto& [a, u] : c)
      for (const auto& [b, v] : o.c)
        r.c[{a.first + b.first, a.second + b.second}] += u * v;
    return r;
  }
  /// Restriction to x = value (a polynomial in y only).
  Poly at_x(double value) const {
    Poly r;
    for (const auto& [e, v] : c)
      r.c[{0, e.second}] += v * std::pow(value, e.first);
    return r;
  }
  Poly at_y(double value) const {
    Poly r;
    for (const auto& [e, v] : c)
      r.c[{e.first, 0}] += v * std::pow(value, e.second);
    return r;
  }

  /// Exact integral over the unit square.
  double integral_square() const {
    double s = 0;
    for (const auto& [e, v] : c)
      s += v / ((e.first + 1.0) * (e.second + 1.0));
    return s;
  }
  /// Exact integral over [0, 1] of a polynomial in one variable (the other
  /// exponent must be zero).
  double integral_line() const {
    double s = 0;
    for (const auto& [e, v] : c)
      s += v / (e.first + e.second + 1.0);
    return s;
  }

  hdgqoi::ScalarField field() const {
    const Poly self = *this, gx = dx(), gy = dy();
    return hdgqoi::ScalarField([self](const Point& x) { return self(x); },
                               [gx, gy](const Point& x) { return Vec2(gx(x), gy(x)); });
  }
};

inline Poly random_poly(Gen& g, int degree) {
  Poly p;
  for (int d = 0; d <= degree; ++d)
    for (int a = 0; a <= d; ++a)
      p.c[{a, d - a}] = g.uniform(-1, 1);
  return p;
}

inline Poly monomial(int a, int b, double coeff = 1.0) {
  Poly p;
  p.c[{a, b}] = coeff;
  return p;
}

/// -Laplacian (nu = 1).
inline Poly minus_laplacian(const Poly& u) { return (u.dx().dx() + u.dy().dy()).scaled(-1.0); }

/// Outward normal derivative on side 'L' (x=0), 'R' (x=1), 'B' (y=0), 'T' (y=1),
/// as a function on the whole plane.
inline Poly normal_derivative(const Poly& u, char side) {
  switch (side) {
  case 'L': return u.dx().scaled(-1.0);
  case 'R': return u.dx();
  case 'B': return u.dy().scaled(-1.0);
  default: return u.dy();
  }
}

/// Field equal to `per_side[side]` on the matching side of the unit square.
inline hdgqoi::ScalarField side_field(const std::map<char, Poly>& per_side) {
  auto pick = [per_side](const Point& x) -> const Poly* {
    const double tol = 1e-12;
    for (const auto& [side, p] : per_side) {
      if ((side == 'L' && x.x() < tol) || (side == 'R' && x.x() > 1 - tol) ||
          (side == 'B' && x.y() < tol) || (side == 'T' && x.y() > 1 - tol))
        return &p;
    }
    return nullptr;
  };
  return hdgqoi::ScalarField(
      [pick](const Point& x) {
        const Poly* p = pick(x);
        return p ? (*p)(x) : 0.0;
      },
      [pick](const Point& x) {
        const Poly* p = pick(x);
        return p ? Vec2(p->dx()(x), p->dy()(x)) : Vec2(0, 0);
      });
}

/// Manufactured primal/output pair on the unit square with nu = 1 and
/// Neumann sides listed in `neumann`. The exact output is integrated by hand
/// from the monomial form.
struct Manufactured {
  hdgqoi::ProblemData data;
  hdgqoi::OutputFunctional out;
  double exact = 0.0;
};

inline Manufactured manufacture(const Poly& u, const Poly& xi, const std::string& neumann) {
  Manufactured m;
  m.data.source = minus_laplacian(u).field();
  m.data.dirichlet = u.field();
  m.out.source = minus_laplacian(xi).field();
  m.out.dirichlet = xi.field();
  std::map<char, Poly> gn, gno;
  for (char side : neumann) {
    gn[side] = normal_derivative(u, side).scaled(-1.0); // -grad u . n
    gno[side] = normal_derivative(xi, side);            // adjoint flux datum is -g_N^O
  }
  m.data.neumann = gn.empty() ? hdgqoi::ScalarField::zero() : side_field(gn);
  m.out.neumann = gno.empty() ? hdgqoi::ScalarField::zero() : side_field(gno);

  // s = (f^O, u) + <g_D^O, -grad u . n>_D + <g_N^O, u>_N
  m.exact = (minus_laplacian(xi) * u).integral_square();
  for (char side : std::string("LRBT")) {
    auto restrict = [&](const Poly& p) {
      switch (side) {
      case 'L': return p.at_x(0.0);
      case 'R': return p.at_x(1.0);
      case 'B': return p.at_y(0.0);
      default: return p.at_y(1.0);
      }
    };
    if (neumann.find(side) == std::string::npos)
      m.exact += restrict(xi * normal_derivative(u, side).scaled(-1.0)).integral_line();
    else
      m.exact += restrict(normal_derivative(xi, side) * u).integral_line();
  }
  return m;
}

/// Unit square grid with interior vertices randomly displaced by up to
/// `jitter` of the spacing.
inline hdgqoi::Mesh jittered_square(Gen& g, int n, double jitter, const std::string& neumann = "") {
  const hdgqoi::Mesh base = hdgqoi::unit_square_structured(n, neumann);
  std::vector<Point> v = base.vertices();
  for (auto& x : v) {
    const bool boundary = x.x() < 1e-12 || x.x() > 1 - 1e-12 || x.y() < 1e-12 || x.y() > 1 - 1e-12;
    if (!boundary)
      x += Vec2(g.uniform(-jitter, jitter), g.uniform(-jitter, jitter)) / n;
  }
  return hdgqoi::Mesh(v, base.elements(), {}, {{0, 1.0}}, base.boundary_tags());
}

/// Independent conformity check from the raw element list: every edge used
/// once (boundary) or twice with opposite orientation, no vertex strictly
/// inside another edge, positive orientation.
inline std::string independent_conformity(const hdgqoi::Mesh& mesh) {
  std::map<std::pair<int, int>, int> directed;
  const auto& v = mesh.vertices();
  for (const auto& e : mesh.elements()) {
    const Vec2 a = v[e[1]] - v[e[0]], b = v[e[2]] - v[e[0]];
    if (a.x() * b.y() - a.y() * b.x() <= 0)
      return "non-positive element";
    for (int i = 0; i < 3; ++i)
      ++directed[{e[i], e[(i + 1) % 3]}];
  }
  std::set<std::pair<int, int>> boundary;
  for (const auto& [d, count] : directed) {
    if (count != 1)
      return "edge used twice in the same direction";
    if (!directed.count({d.second, d.first}))
      boundary.insert({std::min(d.first, d.second), std::max(d.first, d.second)});
  }
  for (const auto& [a, b] : boundary) {
    const Vec2 t = v[b] - v[a];
    for (std::size_t w = 0; w < v.size(); ++w) {
      if ((int)w == a || (int)w == b)
        continue;
      const Vec2 r = v[w] - v[a];
      const double cross = t.x() * r.y() - t.y() * r.x();
      const double along = r.dot(t) / t.squaredNorm();
      if (std::abs(cross) < 1e-12 * t.squaredNorm() && along > 1e-12 && along < 1 - 1e-12)
        return "hanging vertex on an edge";
    }
  }
  return "";
}

} // namespace testing
