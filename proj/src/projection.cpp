#include "hdgqoi/projection.hpp"

#include "hdgqoi/basis.hpp"
#include "hdgqoi/element.hpp"
#include "hdgqoi/quadrature.hpp"

#include <cmath>

namespace hdgqoi {

ScalarPoly project_element(const ScalarField& f, const Mesh& mesh, int k, int q,
                           int quad_degree) {
  if (quad_degree < 0)
    quad_degree = 2 * q + 4;
  const ElementValues ev = element_values(mesh, k, q, quad_degree);
  Eigen::VectorXd fw(ev.points.size());
  for (std::size_t i = 0; i < ev.points.size(); ++i)
    fw[i] = ev.weights[i] * f.checked(ev.points[i], "projected function");
  return {k, q, ev.phi.transpose() * fw};
}

EdgePoly project_edge(const ScalarField& g, const Mesh& mesh, int f, int q, int quad_degree) {
  if (quad_degree < 0)
    quad_degree = 2 * q + 4;
  const LineRule& rule = line_rule(quad_degree);
  const double len = mesh.facet_length(f);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(q + 1);
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const double s = rule.points[i];
    c += rule.weights[i] * len * g.checked(facet_point(mesh, f, s), "projected function") *
         facet_basis(mesh, f, q, s);
  }
  return {f, q, c};
}

double evaluate(const Mesh& mesh, const ScalarPoly& poly, const Point& x) {
  return point_values(mesh, poly.element, poly.degree, x).phi.dot(poly.coeffs);
}

double evaluate(const Mesh& mesh, const EdgePoly& poly, double s) {
  return facet_basis(mesh, poly.facet, poly.degree, s).dot(poly.coeffs);
}

EnergyNorm energy_norm(const PiecewiseVectorField& v, const Mesh& mesh, int quad_degree) {
  EnergyNorm out;
  out.per_element.resize(mesh.num_elements());
  const QuadratureRule& rule = triangle_rule(quad_degree);
  double sum = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const AffineMap map(mesh, k);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 val = v(k, map.to_physical(rule.points[q]));
      s += rule.weights[q] * map.det * val.squaredNorm();
    }
    s /= mesh.nu(k);
    out.per_element[k] = std::sqrt(s);
    sum += s;
  }
  out.total = std::sqrt(sum);
  return out;
}

} // namespace hdgqoi
