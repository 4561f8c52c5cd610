#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hdgqoi {

/// Gauss-Legendre rule on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Rule on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2.
struct QuadratureRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
};

/// Exact for polynomials of degree <= `degree` on [0, 1]. Cached.
const LineRule& line_rule(int degree);

/// Exact for polynomials of degree <= `degree` on the reference triangle.
/// Built from a collapsed (Duffy) tensor product of Gauss-Legendre rules, so
/// all points are interior and all weights positive. Cached.
const QuadratureRule& triangle_rule(int degree);

} // namespace hdgqoi
