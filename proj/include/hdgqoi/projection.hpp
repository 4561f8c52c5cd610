#pragma once

#include "hdgqoi/fields.hpp"
#include "hdgqoi/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace hdgqoi {

/// Default rule degree for integrals involving data functions at degree p.
constexpr int data_quad_degree(int p) { return 2 * p + 4; }

/// Polynomial on one element in the orthonormal element basis.
struct ScalarPoly {
  int element = -1;
  int degree = 0;
  Eigen::VectorXd coeffs;
};

/// Polynomial on one facet in the orthonormal Legendre facet basis.
struct EdgePoly {
  int facet = -1;
  int degree = 0;
  Eigen::VectorXd coeffs;
};

/// L2(K) projection onto P^q(K). `quad_degree < 0` selects 2q + 4.
ScalarPoly project_element(const ScalarField& f, const Mesh& mesh, int k, int q,
                           int quad_degree = -1);

/// L2(e) projection onto P^q(e). `quad_degree < 0` selects 2q + 4.
EdgePoly project_edge(const ScalarField& g, const Mesh& mesh, int f, int q,
                      int quad_degree = -1);

double evaluate(const Mesh& mesh, const ScalarPoly& poly, const Point& x);
double evaluate(const Mesh& mesh, const EdgePoly& poly, double s);

/// Vector field given piecewise: value on element k at x.
using PiecewiseVectorField = std::function<Vec2(int k, const Point& x)>;

struct EnergyNorm {
  double total = 0.0;
  std::vector<double> per_element; // ||v||_K
};

/// sqrt(sum_K (nu^{-1} v, v)_K) with the elementwise restrictions.
EnergyNorm energy_norm(const PiecewiseVectorField& v, const Mesh& mesh, int quad_degree);

} // namespace hdgqoi
