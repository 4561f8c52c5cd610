#include "support.hpp"

#include "hdgqoi/basis.hpp"
#include "hdgqoi/element.hpp"
#include "hdgqoi/errors.hpp"
#include "hdgqoi/projection.hpp"
#include "hdgqoi/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace hdgqoi;
using testing::Gen;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

Mesh reference_triangle(double scale = 1.0) {
  return Mesh({{0, 0}, {scale, 0}, {0, scale}}, {{{0, 1, 2}}}, {}, {{0, 1.0}},
              {{{0, 1}, BoundaryTag::Dirichlet},
               {{1, 2}, BoundaryTag::Dirichlet},
               {{0, 2}, BoundaryTag::Dirichlet}});
}

} // namespace

TEST_CASE("quadrature integrates monomials exactly") {
  for (int d = 0; d <= 16; ++d) {
    const LineRule& l = line_rule(d);
    for (int a = 0; a <= d; ++a) {
      double s = 0;
      for (std::size_t q = 0; q < l.points.size(); ++q)
        s += l.weights[q] * std::pow(l.points[q], a);
      CHECK(s == testing::rel(1.0 / (a + 1), 1e-13));
    }
    const QuadratureRule& t = triangle_rule(d);
    double total = 0;
    for (double w : t.weights) {
      CHECK(w > 0);
      total += w;
    }
    CHECK(total == testing::rel(0.5, 1e-14));
    // int_T x^a y^b = a! b! / (a + b + 2)!
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        double s = 0;
        for (std::size_t q = 0; q < t.size(); ++q)
          s += t.weights[q] * std::pow(t.points[q].x(), a) * std::pow(t.points[q].y(), b);
        CHECK(s == testing::rel(factorial(a) * factorial(b) / factorial(a + b + 2), 1e-13));
      }
  }
}

TEST_CASE("element and facet bases are orthonormal") {
  for (int q = 0; q <= 5; ++q) {
    CHECK(ReferenceBasis::get(q).size() == dim_p(q));
    const QuadratureRule& t = triangle_rule(2 * q + 2);
    const auto tab = ReferenceBasis::get(q).tabulate(t.points);
    Eigen::MatrixXd gram = tab.values.transpose() *
                           Eigen::Map<const Eigen::VectorXd>(t.weights.data(), t.size()).asDiagonal() *
                           tab.values;
    CHECK((gram - Eigen::MatrixXd::Identity(dim_p(q), dim_p(q))).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(tab.values(0, 0) == testing::rel(std::sqrt(2.0)));

    const LineRule& l = line_rule(2 * q + 2);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(q + 1, q + 1);
    for (std::size_t i = 0; i < l.points.size(); ++i) {
      const Eigen::VectorXd v = edge_basis(q, l.points[i]);
      g += l.weights[i] * v * v.transpose();
    }
    CHECK((g - Eigen::MatrixXd::Identity(q + 1, q + 1)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("physical element basis: orthonormal, gradients by differences") {
  Gen g(11);
  const Mesh m = testing::jittered_square(g, 2, 0.3);
  for (int k = 0; k < m.num_elements(); ++k) {
    const ElementValues ev = element_values(m, k, 3, 8);
    const Eigen::MatrixXd gram = ev.phi.transpose() * ev.weights.asDiagonal() * ev.phi;
    CHECK((gram - Eigen::MatrixXd::Identity(dim_p(3), dim_p(3))).cwiseAbs().maxCoeff() < 1e-11);
    const Point x = m.centroid(k);
    const PointValues pv = point_values(m, k, 3, x);
    const double h = 1e-6;
    const PointValues px = point_values(m, k, 3, x + Vec2(h, 0));
    const PointValues mx = point_values(m, k, 3, x - Vec2(h, 0));
    const Eigen::VectorXd fd = (px.phi - mx.phi) / (2 * h);
    CHECK((fd - pv.grad.col(0)).cwiseAbs().maxCoeff() < 1e-6 * (1 + pv.grad.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("Lagrange nodal to modal map interpolates polynomials") {
  Gen g(5);
  for (int r = 1; r <= 4; ++r) {
    const testing::Poly p = testing::random_poly(g, r);
    const auto& nodes = lagrange_nodes(r);
    CHECK(static_cast<int>(nodes.size()) == dim_p(r));
    Eigen::VectorXd vals(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      vals[i] = p(nodes[i].xi);
    const Eigen::VectorXd c = nodal_to_modal(r) * vals;
    const Point x(0.21, 0.37);
    CHECK(ReferenceBasis::get(r).values(x).dot(c) == testing::rel(p(x), 1e-12));
  }
}

TEST_CASE("element projection") {
  const Mesh ref = reference_triangle();
  SUBCASE("constants are reproduced") {
    for (int q = 0; q <= 3; ++q) {
      const ScalarPoly p = project_element(ScalarField::constant(2.5), ref, 0, q);
      CHECK(evaluate(ref, p, Point(0.2, 0.3)) == testing::rel(2.5));
    }
  }
  SUBCASE("x onto constants gives the centroid value 1/3") {
    const ScalarPoly p =
        project_element(ScalarField([](const Point& x) { return x.x(); }), ref, 0, 0);
    CHECK(evaluate(ref, p, Point(0.7, 0.1)) == testing::rel(1.0 / 3.0, 1e-14));
  }
  SUBCASE("polynomials of degree q are reproduced; residual orthogonal to P^q") {
    Gen g(3);
    const Mesh m = testing::jittered_square(g, 2, 0.25);
    for (int trial = 0; trial < 20; ++trial) {
      const int q = g.integer(0, 4);
      const int k = g.integer(0, m.num_elements() - 1);
      const testing::Poly u = testing::random_poly(g, q);
      const ScalarPoly pu = project_element(u.field(), m, k, q);
      const Point x = m.centroid(k);
      CHECK(evaluate(m, pu, x) == testing::rel(u(x), 1e-12));

      const double a = g.uniform(1, 4), b = g.uniform(1, 4);
      const ScalarField f([a, b](const Point& x) { return std::sin(a * x.x()) * std::exp(b * x.y()); });
      const ScalarPoly pf = project_element(f, m, k, q, 20);
      const testing::Poly w = testing::random_poly(g, q);
      const ElementValues ev = element_values(m, k, q, 20);
      double inner = 0, nf = 0, nw = 0;
      for (std::size_t i = 0; i < ev.points.size(); ++i) {
        const double r = f(ev.points[i]) - evaluate(m, pf, ev.points[i]);
        inner += ev.weights[i] * r * w(ev.points[i]);
        nf += ev.weights[i] * f(ev.points[i]) * f(ev.points[i]);
        nw += ev.weights[i] * w(ev.points[i]) * w(ev.points[i]);
      }
      CHECK(std::abs(inner) <= 1e-10 * std::sqrt(nf * nw));
    }
  }
  SUBCASE("non-finite data is reported") {
    const ScalarField bad([](const Point&) { return std::numeric_limits<double>::quiet_NaN(); });
    CHECK_THROWS_AS(project_element(bad, ref, 0, 1), EvaluationError);
  }
}

TEST_CASE("edge projection") {
  const Mesh m = unit_square_structured(1);
  int right = -1;
  for (int f = 0; f < m.num_facets(); ++f) {
    const Point a = m.vertex(m.facet(f).vertices[0]), b = m.vertex(m.facet(f).vertices[1]);
    if (a.x() == 1.0 && b.x() == 1.0)
      right = f;
  }
  REQUIRE(right >= 0);
  const EdgePoly c = project_edge(ScalarField::constant(-3.0), m, right, 2);
  CHECK(evaluate(m, c, 0.3) == testing::rel(-3.0));
  const EdgePoly s = project_edge(
      ScalarField([](const Point& x) { return std::sin(std::numbers::pi * x.y()); }), m, right, 0, 30);
  CHECK(evaluate(m, s, 0.5) == testing::rel(2.0 / std::numbers::pi, 1e-13));
  Gen g(9);
  for (int q = 0; q <= 4; ++q) {
    const testing::Poly p = testing::random_poly(g, q);
    const EdgePoly e = project_edge(p.field(), m, right, q);
    for (double t : {0.0, 0.25, 0.9})
      CHECK(evaluate(m, e, t) == testing::rel(p(facet_point(m, right, t)), 1e-12));
  }
}

TEST_CASE("energy norm") {
  const Mesh m = unit_square_crisscross(0);
  CHECK(energy_norm([](int, const Point&) { return Vec2(0, 0); }, m, 2).total == 0.0);
  const EnergyNorm one = energy_norm([](int, const Point&) { return Vec2(1, 0); }, m, 2);
  CHECK(one.total == testing::rel(1.0, 1e-14));
  CHECK(one.per_element.size() == 16u);
  const Mesh m4 = unit_square_crisscross(0, 4.0);
  CHECK(energy_norm([](int, const Point&) { return Vec2(1, 0); }, m4, 2).total ==
        testing::rel(0.5, 1e-14));
}
