#include "support.hpp"

#include "hdgqoi/bounds.hpp"
#include "hdgqoi/element.hpp"
#include "hdgqoi/errors.hpp"
#include "hdgqoi/problems.hpp"
#include "hdgqoi/refine.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

using namespace hdgqoi;
using testing::Gen;

namespace {

std::shared_ptr<const Mesh> share(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

HdgOptions opts(int p, double tau = 1.0) {
  HdgOptions o;
  o.degree = p;
  o.tau = tau;
  return o;
}

struct Pair {
  Reconstruction primal;
  Reconstruction adjoint;
};

Pair solve_pair(const std::shared_ptr<const Mesh>& mesh, const ProblemData& data,
                const OutputFunctional& out, int p, bool optimize = false, double tau = 1.0) {
  return {reconstruct(solve_primal(mesh, data, opts(p, tau)), data.dirichlet, optimize),
          reconstruct(solve_adjoint(mesh, out, opts(p, tau)), adjoint_data(out).dirichlet, optimize)};
}

} // namespace

TEST_CASE("Poincare and trace constants") {
  ElementGeometry g;
  g.diameter = M_PI;
  g.area = 1.0;
  g.facet_length = {1, 1, 1};
  g.opposite_distance = {1, 1, 1};
  CHECK(poincare_constants(g, 0).c1 == testing::rel(1.0));

  const Mesh m = unit_square_structured(1);
  // element 0 is (0,0), (1,0), (1,1); local facet 1 is the hypotenuse
  const ElementGeometry r = m.geometry(0);
  CHECK(r.diameter == testing::rel(std::sqrt(2.0)));
  CHECK(r.opposite_distance[1] == testing::rel(1.0));
  const PoincareConstants c = poincare_constants(r, 1);
  CHECK(c.c1 == testing::rel(std::sqrt(2.0) / M_PI));
  CHECK(c.c2 == testing::rel(1.3588, 1e-4));

  ElementGeometry big = r;
  big.diameter *= 2;
  big.area *= 4;
  for (int i = 0; i < 3; ++i) {
    big.facet_length[i] *= 2;
    big.opposite_distance[i] *= 2;
  }
  for (int i = 0; i < 3; ++i) {
    CHECK(poincare_constants(big, i).c1 == testing::rel(2 * poincare_constants(r, i).c1));
    CHECK(poincare_constants(big, i).c2 ==
          testing::rel(std::sqrt(2.0) * poincare_constants(r, i).c2));
  }
}

TEST_CASE("kappa is the ratio of the reconstruction residuals") {
  const Problem pr = builtin("example1_s1");
  const auto mesh = share(unit_square_crisscross(1));
  const Pair a = solve_pair(mesh, pr.data, pr.output, 1);
  const KappaResult k = compute_kappa(a.primal, a.adjoint);
  CHECK_FALSE(k.degenerate);
  CHECK(k.kappa == testing::rel(k.adjoint_residual / k.primal_residual));
  const Pair b = solve_pair(mesh, pr.data, pr.output.scaled(3.0), 1);
  CHECK(compute_kappa(b.primal, b.adjoint).kappa == testing::rel(3 * k.kappa));

  for (double kappa : {1.0, 2.0, k.kappa}) {
    BoundsOptions o;
    o.kappa = kappa;
    const BoundsResult r = compute_bounds(a.primal, a.adjoint, pr.data, pr.output, o);
    CAPTURE(kappa);
    CHECK(r.kappa == kappa);
    CHECK(r.s_minus <= *pr.exact);
    CHECK(*pr.exact <= r.s_plus);
  }
  BoundsOptions bad;
  bad.kappa = -1;
  CHECK_THROWS_AS(compute_bounds(a.primal, a.adjoint, pr.data, pr.output, bad), InputError);
}

TEST_CASE("polynomial data have no oscillation") {
  Gen g(11);
  for (int p = 1; p <= 3; ++p) {
    const auto m = testing::manufacture(testing::random_poly(g, p + 1), testing::random_poly(g, p + 1), "RB");
    const Mesh mesh = testing::jittered_square(g, 3, 0.2, "RB");
    CHECK(data_oscillation(mesh, p, m.data, m.out) < 1e-12);
  }
  const Problem pr = builtin("example1_s1");
  CHECK(data_oscillation(unit_square_crisscross(0), 1, pr.data, pr.output) > 1e-3);
}

TEST_CASE("exact reconstructions collapse the bounds") {
  Gen g(12);
  for (int p = 1; p <= 3; ++p) {
    const auto m = testing::manufacture(testing::random_poly(g, p), testing::random_poly(g, p), "L");
    const auto mesh = share(testing::jittered_square(g, 3, 0.15, "L"));
    const Pair a = solve_pair(mesh, m.data, m.out, p);
    const BoundsResult b = compute_bounds(a.primal, a.adjoint, m.data, m.out);
    CHECK(b.kappa_degenerate);
    CHECK(b.kappa == 1.0);
    for (int s = 0; s < 2; ++s)
      for (double e : b.eta.total[s])
        CHECK(std::abs(e) < 1e-9);
    CHECK(b.s_minus == testing::rel(m.exact, 1e-9));
    CHECK(b.s_plus == testing::rel(m.exact, 1e-9));
  }
}

TEST_CASE("bounds on the smooth problem") {
  const Problem pr = builtin("example1_s1");
  const auto mesh = share(unit_square_crisscross(0));
  const Pair a = solve_pair(mesh, pr.data, pr.output, 2, true);
  const BoundsResult b = compute_bounds(a.primal, a.adjoint, pr.data, pr.output);
  CHECK(std::abs(b.s_tilde - 0.405275669432) <= 1e-6);
  CHECK(b.half_gap == testing::rel(1.26e-4, 0.01));
  CHECK(b.s_minus <= *pr.exact);
  CHECK(*pr.exact <= b.s_plus);
}

TEST_CASE("bounds contain the exact output for random manufactured problems") {
  Gen g(13);
  for (int trial = 0; trial < 12; ++trial) {
    const int p = g.integer(1, 3);
    const std::string sides = g.coin() ? "R" : "";
    const auto m = testing::manufacture(testing::random_poly(g, p + 1), testing::random_poly(g, p + 1), sides);
    const auto mesh = share(testing::jittered_square(g, g.integer(2, 4), 0.2, sides));
    const double tau = g.uniform(0.1, 10);
    const Pair a = solve_pair(mesh, m.data, m.out, p, g.coin(), tau);
    for (EtaMode mode : {EtaMode::Projected, EtaMode::ZeroOrder}) {
      BoundsOptions o;
      o.mode = mode;
      const BoundsResult b = compute_bounds(a.primal, a.adjoint, m.data, m.out, o);
      CAPTURE(trial);
      CHECK(b.s_minus <= m.exact + 1e-12);
      CHECK(m.exact <= b.s_plus + 1e-12);
    }
  }
}

TEST_CASE("energy-norm form agrees with the general bounds") {
  const Problem pr = builtin("example2_s1");
  auto mesh = share(pr.initial_mesh());
  for (int level = 0; level < 3; ++level) {
    for (int p = 1; p <= 2; ++p) {
      const Pair a = solve_pair(mesh, pr.data, pr.output, p);
      const BoundsResult b = compute_bounds(a.primal, a.adjoint, pr.data, pr.output);
      const BoundsResult t = theorem1_bounds(a.primal, a.adjoint, pr.data, pr.output);
      CHECK(std::abs(b.s_minus - t.s_minus) <= 1e-12);
      CHECK(std::abs(b.s_plus - t.s_plus) <= 1e-12);
    }
    mesh = share(refine(*mesh, all_elements(*mesh), pr.refiner));
  }
  const Problem smooth = builtin("example1_s1");
  const auto m16 = share(unit_square_crisscross(0));
  const Pair s = solve_pair(m16, smooth.data, smooth.output, 1);
  CHECK_THROWS_AS(theorem1_bounds(s.primal, s.adjoint, smooth.data, smooth.output), UnsupportedError);
}

TEST_CASE("self-adjoint bounds match the energy functionals") {
  // with f^O = f, zero boundary data and polynomial f, the bounds reduce to
  // 2 (f, u) - ||grad u||^2 <= s <= ||flux||^2
  const Problem pr = builtin("example2_s1");
  const auto mesh = share(refine(pr.initial_mesh(), all_elements(pr.initial_mesh()), pr.refiner));
  for (int p = 1; p <= 3; ++p) {
    const Pair a = solve_pair(mesh, pr.data, pr.output, p);
    const BoundsResult b = compute_bounds(a.primal, a.adjoint, pr.data, pr.output);
    double lower = 0, upper = 0;
    for (int k = 0; k < mesh->num_elements(); ++k) {
      const ElementValues ev = element_values(*mesh, k, 0, 2 * p + 6);
      for (std::size_t q = 0; q < ev.points.size(); ++q) {
        const Point& x = ev.points[q];
        const Vec2 gu = a.primal.potential.gradient(k, x);
        lower += ev.weights[q] * (2 * pr.data.source(x) * a.primal.potential.value(k, x) - gu.squaredNorm());
        upper += ev.weights[q] * a.primal.flux.at(k, x).squaredNorm();
      }
    }
    CAPTURE(p);
    CHECK(b.kappa == testing::rel(1.0, 1e-12));
    CHECK(b.s_minus == testing::rel(lower, 1e-11));
    CHECK(b.s_plus == testing::rel(upper, 1e-11));
  }
}

TEST_CASE("bounds scale with the output") {
  const Problem pr = builtin("example1_s1");
  const auto mesh = share(unit_square_crisscross(1));
  const Pair a = solve_pair(mesh, pr.data, pr.output, 2);
  const Pair b = solve_pair(mesh, pr.data, pr.output.scaled(7.0), 2);
  const BoundsResult ra = compute_bounds(a.primal, a.adjoint, pr.data, pr.output);
  const BoundsResult rb = compute_bounds(b.primal, b.adjoint, pr.data, pr.output.scaled(7.0));
  CHECK(rb.s_minus == testing::rel(7 * ra.s_minus, 1e-12));
  CHECK(rb.s_plus == testing::rel(7 * ra.s_plus, 1e-12));
  const BoundsResult rn = compute_bounds(a.primal, b.adjoint, pr.data, pr.output.scaled(-7.0));
  (void)rn;
}

TEST_CASE("result invariants") {
  Gen g(14);
  for (const char* id : {"example1_s1", "example1_s2", "example2_s1", "example2_s2"}) {
    const Problem pr = builtin(id);
    const auto mesh = share(pr.initial_mesh());
    const int p = g.integer(1, 3);
    const Pair a = solve_pair(mesh, pr.data, pr.output, p);
    const BoundsResult b = compute_bounds(a.primal, a.adjoint, pr.data, pr.output);
    CAPTURE(id);
    CHECK(b.s_minus <= b.s_plus);
    CHECK(b.s_tilde == testing::rel(0.5 * (b.s_minus + b.s_plus)));
    CHECK(b.half_gap == testing::rel(0.5 * (b.s_plus - b.s_minus)));
    CHECK(static_cast<int>(b.gap.size()) == mesh->num_elements());
    for (double x : b.gap)
      CHECK(x >= 0.0);
    CHECK(std::abs(std::accumulate(b.gap.begin(), b.gap.end(), 0.0) - (b.s_plus - b.s_minus)) <=
          1e-13 * (1 + std::abs(b.s_plus)));
    for (int s = 0; s < 2; ++s)
      for (int k = 0; k < mesh->num_elements(); ++k)
        CHECK(b.eta.total[s][k] ==
              testing::rel(b.eta.flux[s][k] + b.eta.source[s][k] + b.eta.neumann[s][k], 1e-12));
  }
}

TEST_CASE("csv output") {
  const std::string h = csv_header(true);
  CHECK(h.rfind("nel,n_edge_dofs,s_minus,s_plus,s_tilde,half_gap", 0) == 0);
  CHECK(csv_header(false).size() < h.size());
  BoundsResult b;
  b.s_minus = 0.25;
  b.s_plus = 0.75;
  b.s_tilde = 0.5;
  b.half_gap = 0.25;
  const std::string row = csv_row(b, 16, 64, 0.5);
  std::istringstream in(row);
  std::string cell;
  std::vector<std::string> cells;
  while (std::getline(in, cell, ','))
    cells.push_back(cell);
  std::istringstream hin(h);
  int columns = 0;
  while (std::getline(hin, cell, ','))
    ++columns;
  CHECK(static_cast<int>(cells.size()) == columns);
  CHECK(cells[0] == "16");
  CHECK(cells[1] == "64");
  CHECK(std::stod(cells[2]) == 0.25);
  CHECK(std::stod(cells.back()) == 0.0);
}
