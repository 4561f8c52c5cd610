#include "hdgqoi/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hdgqoi {

namespace {

// n-point Gauss-Legendre on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1)
        p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

LineRule make_line_rule(int degree) {
  const int n = std::max(1, (degree + 2) / 2);
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  LineRule r;
  r.degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    r.points.push_back(0.5 * (x[i] + 1.0));
    r.weights.push_back(0.5 * w[i]);
  }
  return r;
}

QuadratureRule make_triangle_rule(int degree) {
  // x = u, y = v (1 - u), dx dy = (1 - u) du dv.
  const LineRule& ru = line_rule(degree + 1);
  const LineRule& rv = line_rule(degree);
  QuadratureRule r;
  r.degree = degree;
  for (std::size_t i = 0; i < ru.points.size(); ++i) {
    const double u = ru.points[i];
    for (std::size_t j = 0; j < rv.points.size(); ++j) {
      const double v = rv.points[j];
      r.points.emplace_back(u, v * (1.0 - u));
      r.weights.push_back(ru.weights[i] * rv.weights[j] * (1.0 - u));
    }
  }
  return r;
}

template <typename Rule, typename Make>
const Rule& cached(std::map<int, std::unique_ptr<Rule>>& cache, std::mutex& m,
                   int degree, Make make) {
  if (degree < 0)
    throw std::invalid_argument("quadrature degree must be non-negative");
  std::lock_guard lock(m);
  auto it = cache.find(degree);
  if (it == cache.end())
    it = cache.emplace(degree, std::make_unique<Rule>(make(degree))).first;
  return *it->second;
}

} // namespace

const LineRule& line_rule(int degree) {
  static std::map<int, std::unique_ptr<LineRule>> cache;
  static std::mutex m;
  return cached(cache, m, degree, make_line_rule);
}

const QuadratureRule& triangle_rule(int degree) {
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  static std::mutex m;
  return cached(cache, m, degree, make_triangle_rule);
}

} // namespace hdgqoi
