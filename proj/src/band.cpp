#include "hdgqoi/errors.hpp"
#include "hdgqoi/quadrature.hpp"
#include "hdgqoi/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hdgqoi {

namespace {

constexpr double kGeomTol = 1e-12;

// +1 when the domain lies on the side of larger coordinates.
int interior_side(const Mesh& mesh, const BoundaryPortion& portion) {
  for (const Facet& f : mesh.facets()) {
    if (!f.is_boundary())
      continue;
    const Point& a = mesh.vertex(f.vertices[0]);
    const Point& b = mesh.vertex(f.vertices[1]);
    if (std::abs(a[portion.axis] - portion.coordinate) < kGeomTol &&
        std::abs(b[portion.axis] - portion.coordinate) < kGeomTol)
      return mesh.centroid(f.elements[0])[portion.axis] > portion.coordinate ? 1 : -1;
  }
  throw InputError("boundary portion does not contain any boundary facet");
}

} // namespace

BoundaryPortion unresolved_portion(const ContinuousPotential& pot) {
  const Mesh& mesh = pot.mesh();
  if (pot.unresolved_dirichlet_facets.empty())
    throw InputError("no unresolved Dirichlet facets");
  for (int axis = 0; axis < 2; ++axis) {
    const double c = mesh.vertex(mesh.facet(pot.unresolved_dirichlet_facets[0]).vertices[0])[axis];
    bool ok = true;
    for (int f : pot.unresolved_dirichlet_facets)
      for (int v : mesh.facet(f).vertices)
        ok = ok && std::abs(mesh.vertex(v)[axis] - c) < kGeomTol;
    if (ok)
      return {axis, c};
  }
  throw UnsupportedError("non-polynomial Dirichlet datum on facets that do not share one "
                         "coordinate-aligned line; exact enforcement is not available");
}

double band_coordinate(const Mesh& mesh, const BoundaryPortion& portion) {
  const int a = portion.axis;
  const int side = interior_side(mesh, portion);
  std::vector<double> candidates;
  for (const Point& v : mesh.vertices())
    if (side * (v[a] - portion.coordinate) > kGeomTol)
      candidates.push_back(v[a]);
  // Closest to the boundary first.
  std::sort(candidates.begin(), candidates.end(),
            [&](double x, double y) { return side * x < side * y; });
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](double x, double y) { return std::abs(x - y) < kGeomTol; }),
                   candidates.end());
  for (double c : candidates) {
    bool cuts = false;
    for (int k = 0; k < mesh.num_elements() && !cuts; ++k) {
      double lo = 1e300, hi = -1e300;
      for (int v : mesh.element(k)) {
        lo = std::min(lo, mesh.vertex(v)[a]);
        hi = std::max(hi, mesh.vertex(v)[a]);
      }
      cuts = lo < c - kGeomTol && hi > c + kGeomTol;
    }
    if (!cuts)
      return c;
  }
  throw SolverError("no mesh line parallel to the Dirichlet portion bounds a band of whole "
                    "elements; refine the mesh next to that boundary");
}

ContinuousPotential enforce_dirichlet_band(ContinuousPotential pot, const ScalarField& dirichlet,
                                           const BoundaryPortion& portion) {
  const Mesh& mesh = pot.mesh();
  const int a = portion.axis;
  const double cb = portion.coordinate;
  const double c = band_coordinate(mesh, portion);

  // Linear blend of the boundary datum, zero on the band line.
  auto project = [a, cb](const Point& x) {
    Point y = x;
    y[a] = cb;
    return y;
  };
  const double width = cb - c;
  ScalarField ghat(
      [=](const Point& x) {
        const double t = (x[a] - c) / width;
        return t >= 0.0 ? dirichlet(project(x)) * t : 0.0;
      },
      [=](const Point& x) -> Vec2 {
        const double t = (x[a] - c) / width;
        if (t < 0.0)
          return Vec2::Zero();
        const Point y = project(x);
        Vec2 g = dirichlet.grad(y) * t;
        g[a] = dirichlet(y) / width;
        return g;
      });

  std::vector<int> band;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    bool inside = true;
    for (int v : mesh.element(k))
      inside = inside && (mesh.vertex(v)[a] - c) / width >= -kGeomTol;
    if (inside)
      band.push_back(k);
  }

  // Nodes on the portion carry the interpolant of ghat, i.e. g_D itself.
  const LagrangeNumbering& num = pot.numbering();
  for (int f : pot.unresolved_dirichlet_facets)
    for (int id : num.facet_nodes[f])
      pot.nodal[id] = dirichlet(num.points[id]);
  pot.sync_coefficients();
  pot.set_correction(ghat, band);

  // The trace must now be exact on every Dirichlet facet.
  const LineRule& rule = line_rule(2 * pot.degree() + 6);
  double worst = 0.0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fc = mesh.facet(f);
    if (!fc.is_dirichlet())
      continue;
    for (double s : rule.points) {
      const Point x = facet_point(mesh, f, s);
      const double g = dirichlet(x);
      worst = std::max(worst, std::abs(pot.value(fc.elements[0], x) - g) / (1.0 + std::abs(g)));
    }
  }
  if (worst > 1e-10) {
    std::ostringstream msg;
    msg << "band extension leaves a Dirichlet trace error of " << worst;
    throw UnsupportedError(msg.str());
  }
  pot.unresolved_dirichlet_facets.clear();
  return pot;
}

} // namespace hdgqoi
