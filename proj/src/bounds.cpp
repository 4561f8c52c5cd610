#include "hdgqoi/bounds.hpp"

#include "hdgqoi/basis.hpp"
#include "hdgqoi/errors.hpp"
#include "hdgqoi/projection.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace hdgqoi {

namespace {

int default_quad(const Reconstruction& rec, int quad_degree) {
  return quad_degree < 0 ? data_quad_degree(rec.potential.degree()) : quad_degree;
}

// Residual flux + nu grad u of one reconstruction at the points of ev.
Eigen::MatrixX2d residual(const Reconstruction& rec, const ElementValues& ev, int k, double nu) {
  return rec.flux.values(ev, k) + nu * rec.potential.gradients(ev, k);
}

double weighted_norm(const Eigen::VectorXd& w, const Eigen::MatrixX2d& v) {
  return std::sqrt(w.dot(v.rowwise().squaredNorm()));
}

double weighted_norm(const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
  return std::sqrt(w.dot(v.cwiseAbs2()));
}

Eigen::VectorXd sample(const ScalarField& f, const std::vector<Point>& pts, const char* what) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(pts.size());
  if (!f.is_zero())
    for (std::size_t q = 0; q < pts.size(); ++q)
      v[q] = f.checked(pts[q], what);
  return v;
}

// d - Pi_K^p d at the points of ev (tabulated at degree >= p).
Eigen::VectorXd element_oscillation(const ScalarField& d, const Mesh& mesh, int k, int p,
                                    const ElementValues& ev, int quad, const char* what) {
  if (d.is_zero())
    return Eigen::VectorXd::Zero(ev.points.size());
  return sample(d, ev.points, what) -
         ev.phi.leftCols(dim_p(p)) * project_element(d, mesh, k, p, quad).coeffs;
}

Eigen::VectorXd facet_oscillation(const ScalarField& d, const Mesh& mesh, int p,
                                  const FacetValues& fv, int quad, const char* what) {
  if (d.is_zero())
    return Eigen::VectorXd::Zero(fv.points.size());
  return sample(d, fv.points, what) -
         fv.psi.leftCols(p + 1) * project_edge(d, mesh, fv.facet, p, quad).coeffs;
}

void check_same_mesh(const Reconstruction& a, const Reconstruction& b) {
  if (&a.flux.mesh() != &b.flux.mesh() || a.flux.degree() != b.flux.degree())
    throw InputError("primal and adjoint reconstructions live on different meshes or degrees");
}

} // namespace

PoincareConstants poincare_constants(const ElementGeometry& g, int local) {
  constexpr double d = 2.0;
  const double hp = g.diameter / M_PI;
  PoincareConstants c;
  c.c1 = hp;
  c.c2 = std::sqrt(g.facet_length[local] / (d * g.area) * hp *
                   (2.0 * g.opposite_distance[local] + d * hp));
  return c;
}

KappaResult compute_kappa(const Reconstruction& primal, const Reconstruction& adjoint,
                          int quad_degree) {
  check_same_mesh(primal, adjoint);
  const Mesh& mesh = primal.flux.mesh();
  const int quad = default_quad(primal, quad_degree);
  const int r = primal.potential.degree();
  double ru = 0.0, rx = 0.0, su = 0.0, sx = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ElementValues ev = element_values(mesh, k, r, quad);
    const double nu = mesh.nu(k);
    const Eigen::VectorXd w = ev.weights / nu;
    ru += w.dot(residual(primal, ev, k, nu).rowwise().squaredNorm());
    rx += w.dot(residual(adjoint, ev, k, nu).rowwise().squaredNorm());
    su += w.dot(primal.flux.values(ev, k).rowwise().squaredNorm());
    sx += w.dot(adjoint.flux.values(ev, k).rowwise().squaredNorm());
  }
  KappaResult out;
  out.primal_residual = std::sqrt(ru);
  out.adjoint_residual = std::sqrt(rx);
  // residuals at roundoff level carry no information about their ratio
  constexpr double floor = 1e-11;
  if (out.primal_residual > floor * std::sqrt(su) && out.adjoint_residual > floor * std::sqrt(sx) &&
      std::isfinite(out.adjoint_residual / out.primal_residual)) {
    out.kappa = out.adjoint_residual / out.primal_residual;
  } else {
    out.kappa = 1.0;
    out.degenerate = true;
  }
  return out;
}

EtaBreakdown compute_eta(const Reconstruction& primal, const Reconstruction& adjoint,
                         const ProblemData& data, const OutputFunctional& out, double kappa,
                         const BoundsOptions& options) {
  check_same_mesh(primal, adjoint);
  if (!(kappa > 0.0))
    throw InputError("kappa must be strictly positive");
  const Mesh& mesh = primal.flux.mesh();
  const int p = primal.flux.degree();
  const int r = primal.potential.degree();
  const int quad = default_quad(primal, options.quad_degree);
  const int ne = mesh.num_elements();
  const bool zero_order = options.mode == EtaMode::ZeroOrder;

  EtaBreakdown eta;
  for (int s = 0; s < 2; ++s) {
    eta.flux[s].assign(ne, 0.0);
    eta.source[s].assign(ne, 0.0);
    eta.neumann[s].assign(ne, 0.0);
    eta.total[s].assign(ne, 0.0);
  }

  for (int k = 0; k < ne; ++k) {
    const ElementValues ev = element_values(mesh, k, r, quad);
    const double nu = mesh.nu(k);
    const Eigen::VectorXd w = ev.weights / nu;
    const Eigen::MatrixX2d ru = residual(primal, ev, k, nu);
    const Eigen::MatrixX2d rx = residual(adjoint, ev, k, nu);
    eta.flux[0][k] = weighted_norm(w, Eigen::MatrixX2d(rx - kappa * ru));
    eta.flux[1][k] = weighted_norm(w, Eigen::MatrixX2d(-rx - kappa * ru));

    const ElementGeometry geo = mesh.geometry(k);
    Eigen::VectorXd osc_u, osc_x;
    if (zero_order) {
      osc_u = sample(data.source, ev.points, "source") -
              (ev.dphi_x * primal.flux.cx.col(k) + ev.dphi_y * primal.flux.cy.col(k));
      osc_x = sample(out.source, ev.points, "output source") -
              (ev.dphi_x * adjoint.flux.cx.col(k) + ev.dphi_y * adjoint.flux.cy.col(k));
    } else {
      osc_u = element_oscillation(data.source, mesh, k, p, ev, quad, "source");
      osc_x = element_oscillation(out.source, mesh, k, p, ev, quad, "output source");
    }
    const double c1 = poincare_constants(geo, 0).c1 / std::sqrt(nu);
    eta.source[0][k] = c1 * weighted_norm(ev.weights, Eigen::VectorXd(osc_x - kappa * osc_u));
    eta.source[1][k] = c1 * weighted_norm(ev.weights, Eigen::VectorXd(-osc_x - kappa * osc_u));

    for (int i = 0; i < 3; ++i) {
      const int f = mesh.element_facets(k)[i];
      if (!mesh.facet(f).is_neumann())
        continue;
      const FacetValues fv = facet_values(mesh, k, i, r, p, quad);
      Eigen::VectorXd gu, gx;
      if (zero_order) {
        auto normal = [&](const EquilibratedFlux& fl) {
          return Eigen::VectorXd(fv.normal.x() * (fv.phi * fl.cx.col(k)) +
                                 fv.normal.y() * (fv.phi * fl.cy.col(k)));
        };
        gu = sample(data.neumann, fv.points, "Neumann datum") - normal(primal.flux);
        gx = sample(out.neumann, fv.points, "output Neumann datum") + normal(adjoint.flux);
      } else {
        gu = facet_oscillation(data.neumann, mesh, p, fv, quad, "Neumann datum");
        gx = facet_oscillation(out.neumann, mesh, p, fv, quad, "output Neumann datum");
      }
      const double c2 = poincare_constants(geo, i).c2 / std::sqrt(nu);
      eta.neumann[0][k] += c2 * weighted_norm(fv.weights, Eigen::VectorXd(-gx - kappa * gu));
      eta.neumann[1][k] += c2 * weighted_norm(fv.weights, Eigen::VectorXd(gx - kappa * gu));
    }
    for (int s = 0; s < 2; ++s)
      eta.total[s][k] = eta.flux[s][k] + eta.source[s][k] + eta.neumann[s][k];
  }
  return eta;
}

namespace {

// (f^O, u) + <g_N^O, u>_N + (f, xi) - <g_N, xi>_N - (nu grad u, grad xi).
double central_estimate(const Reconstruction& primal, const Reconstruction& adjoint,
                        const ProblemData& data, const OutputFunctional& out, int quad) {
  const Mesh& mesh = primal.flux.mesh();
  const int r = primal.potential.degree();
  double s = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ElementValues ev = element_values(mesh, k, r, quad);
    const Eigen::VectorXd u = primal.potential.values(ev, k);
    const Eigen::VectorXd xi = adjoint.potential.values(ev, k);
    const Eigen::MatrixX2d gu = primal.potential.gradients(ev, k);
    const Eigen::MatrixX2d gx = adjoint.potential.gradients(ev, k);
    const Eigen::VectorXd fo = sample(out.source, ev.points, "output source");
    const Eigen::VectorXd f = sample(data.source, ev.points, "source");
    const Eigen::VectorXd grad = gu.cwiseProduct(gx).rowwise().sum();
    s += ev.weights.dot(fo.cwiseProduct(u) + f.cwiseProduct(xi) - mesh.nu(k) * grad);
    for (int i = 0; i < 3; ++i) {
      const int fi = mesh.element_facets(k)[i];
      if (!mesh.facet(fi).is_neumann())
        continue;
      const FacetValues fv = facet_values(mesh, k, i, r, 0, quad);
      Eigen::VectorXd ue(fv.points.size()), xe(fv.points.size());
      for (std::size_t q = 0; q < fv.points.size(); ++q) {
        ue[q] = primal.potential.value(k, fv.points[q]);
        xe[q] = adjoint.potential.value(k, fv.points[q]);
      }
      s += fv.weights.dot(sample(out.neumann, fv.points, "output Neumann datum").cwiseProduct(ue) -
                          sample(data.neumann, fv.points, "Neumann datum").cwiseProduct(xe));
    }
  }
  return s;
}

} // namespace

BoundsResult compute_bounds(const Reconstruction& primal, const Reconstruction& adjoint,
                            const ProblemData& data, const OutputFunctional& out,
                            const BoundsOptions& options) {
  check_same_mesh(primal, adjoint);
  const int quad = default_quad(primal, options.quad_degree);
  BoundsResult b;
  if (options.kappa != 0.0) {
    b.kappa = options.kappa;
  } else {
    const KappaResult k = compute_kappa(primal, adjoint, quad);
    b.kappa = k.kappa;
    b.kappa_degenerate = k.degenerate;
  }
  b.eta = compute_eta(primal, adjoint, data, out, b.kappa, options);
  b.s_central = central_estimate(primal, adjoint, data, out, quad);

  const std::size_t ne = b.eta.total[0].size();
  b.gap.assign(ne, 0.0);
  double minus = 0.0, plus = 0.0;
  for (std::size_t k = 0; k < ne; ++k) {
    const double em = b.eta.total[0][k] * b.eta.total[0][k] / (4.0 * b.kappa);
    const double ep = b.eta.total[1][k] * b.eta.total[1][k] / (4.0 * b.kappa);
    minus += em;
    plus += ep;
    b.gap[k] = em + ep;
  }
  b.s_minus = b.s_central - minus;
  b.s_plus = b.s_central + plus;
  b.s_tilde = 0.5 * (b.s_minus + b.s_plus);
  b.half_gap = 0.5 * (minus + plus);
  return b;
}

double data_oscillation(const Mesh& mesh, int p, const ProblemData& data,
                        const OutputFunctional& out, int quad_degree) {
  const int quad = quad_degree < 0 ? data_quad_degree(p + 1) : quad_degree;
  double worst = 0.0;
  auto rel = [](const Eigen::VectorXd& w, const Eigen::VectorXd& osc, const Eigen::VectorXd& v) {
    return weighted_norm(w, osc) / (1.0 + weighted_norm(w, v));
  };
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ElementValues ev = element_values(mesh, k, p, quad);
    for (const ScalarField* d : {&data.source, &out.source})
      if (!d->is_zero())
        worst = std::max(worst, rel(ev.weights,
                                    element_oscillation(*d, mesh, k, p, ev, quad, "datum"),
                                    sample(*d, ev.points, "datum")));
    for (int i = 0; i < 3; ++i) {
      if (!mesh.facet(mesh.element_facets(k)[i]).is_neumann())
        continue;
      const FacetValues fv = facet_values(mesh, k, i, p, p, quad);
      for (const ScalarField* d : {&data.neumann, &out.neumann})
        if (!d->is_zero())
          worst = std::max(worst, rel(fv.weights,
                                      facet_oscillation(*d, mesh, p, fv, quad, "datum"),
                                      sample(*d, fv.points, "datum")));
    }
  }
  return worst;
}

BoundsResult theorem1_bounds(const Reconstruction& primal, const Reconstruction& adjoint,
                             const ProblemData& data, const OutputFunctional& out,
                             int quad_degree) {
  check_same_mesh(primal, adjoint);
  const Mesh& mesh = primal.flux.mesh();
  const int p = primal.flux.degree();
  const int r = primal.potential.degree();
  const int quad = default_quad(primal, quad_degree);
  const double osc = data_oscillation(mesh, p, data, out, quad);
  if (osc > 1e-12) {
    std::ostringstream msg;
    msg << "data are not polynomial of degree " << p << " (relative oscillation " << osc
        << "); the equilibrated-flux bounds without oscillation terms would not be guaranteed";
    throw UnsupportedError(msg.str());
  }

  double lo = 0.0, cross = 0.0, nu2 = 0.0, nx2 = 0.0;
  std::vector<double> gap_u(mesh.num_elements()), gap_x(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ElementValues ev = element_values(mesh, k, r, quad);
    const double nu = mesh.nu(k);
    const Eigen::VectorXd w = ev.weights / nu;
    const Eigen::MatrixX2d ru = residual(primal, ev, k, nu);
    const Eigen::MatrixX2d rx = residual(adjoint, ev, k, nu);
    const Eigen::MatrixX2d zm =
        adjoint.flux.values(ev, k) - nu * adjoint.potential.gradients(ev, k);
    cross += w.dot(ru.cwiseProduct(zm).rowwise().sum());
    gap_u[k] = w.dot(ru.rowwise().squaredNorm());
    gap_x[k] = w.dot(rx.rowwise().squaredNorm());
    nu2 += gap_u[k];
    nx2 += gap_x[k];
    // l^O(u, flux): source term, Dirichlet flux term, Neumann term.
    lo += ev.weights.dot(sample(out.source, ev.points, "output source")
                             .cwiseProduct(primal.potential.values(ev, k)));
    for (int i = 0; i < 3; ++i) {
      const Facet& fc = mesh.facet(mesh.element_facets(k)[i]);
      if (!fc.is_boundary())
        continue;
      const FacetValues fv = facet_values(mesh, k, i, r, 0, quad);
      if (fc.is_dirichlet() && !out.dirichlet.is_zero()) {
        const Eigen::VectorXd qn = fv.normal.x() * (fv.phi * primal.flux.cx.col(k)) +
                                   fv.normal.y() * (fv.phi * primal.flux.cy.col(k));
        lo += fv.weights.dot(sample(out.dirichlet, fv.points, "output Dirichlet datum")
                                 .cwiseProduct(qn));
      } else if (fc.is_neumann() && !out.neumann.is_zero()) {
        Eigen::VectorXd ue(fv.points.size());
        for (std::size_t q = 0; q < fv.points.size(); ++q)
          ue[q] = primal.potential.value(k, fv.points[q]);
        lo += fv.weights.dot(sample(out.neumann, fv.points, "output Neumann datum")
                                 .cwiseProduct(ue));
      }
    }
  }

  BoundsResult b;
  b.s_central = lo + 0.5 * cross;
  b.s_tilde = b.s_central;
  b.half_gap = 0.5 * std::sqrt(nu2) * std::sqrt(nx2);
  b.s_minus = b.s_tilde - b.half_gap;
  b.s_plus = b.s_tilde + b.half_gap;
  if (nu2 > 0.0 && nx2 > 0.0) {
    b.kappa = std::sqrt(nx2 / nu2);
  } else {
    b.kappa = 1.0;
    b.kappa_degenerate = true;
  }
  // Elementwise split of the gap, ||xi-res||_K^2 / kappa + kappa ||u-res||_K^2, halved.
  b.gap.resize(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k)
    b.gap[k] = 0.5 * (gap_x[k] / b.kappa + b.kappa * gap_u[k]);
  return b;
}

std::string csv_header(bool with_exact) {
  std::string h = "nel,n_edge_dofs,s_minus,s_plus,s_tilde,half_gap,kappa,s_h";
  if (with_exact)
    h += ",abs_err_s_tilde";
  return h;
}

std::string csv_row(const BoundsResult& b, int nel, int n_edge_dofs, double exact) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%d,%.15e,%.15e,%.15e,%.15e,%.15e,%.15e", nel, n_edge_dofs,
                b.s_minus, b.s_plus, b.s_tilde, b.half_gap, b.kappa, b.s_h);
  std::string row = buf;
  if (std::isfinite(exact)) {
    std::snprintf(buf, sizeof buf, ",%.15e", std::abs(exact - b.s_tilde));
    row += buf;
  }
  return row;
}

} // namespace hdgqoi
