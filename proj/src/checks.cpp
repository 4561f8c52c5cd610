#include "hdgqoi/checks.hpp"

#include "hdgqoi/basis.hpp"
#include "hdgqoi/projection.hpp"
#include "hdgqoi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hdgqoi {

double ReconstructionAudit::worst() const {
  return std::max({divergence, normal_jump, neumann, dirichlet, continuity});
}

std::string ReconstructionAudit::describe() const {
  std::ostringstream out;
  out << "divergence " << divergence << ", normal jump " << normal_jump << ", Neumann "
      << neumann << ", Dirichlet " << dirichlet << ", continuity " << continuity;
  return out.str();
}

ReconstructionAudit audit_flux(const EquilibratedFlux& flux, const ScalarField& source,
                               const ScalarField& normal_flux) {
  const Mesh& mesh = flux.mesh();
  const int p = flux.degree();
  const int r = flux.storage_degree();
  const int quad = data_quad_degree(r);
  ReconstructionAudit a;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ElementValues ev = element_values(mesh, k, r, quad);
    const Eigen::VectorXd div = ev.dphi_x * flux.cx.col(k) + ev.dphi_y * flux.cy.col(k);
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(div.size());
    if (!source.is_zero())
      proj = ev.phi.leftCols(dim_p(p)) * project_element(source, mesh, k, p).coeffs;
    const double err = std::sqrt(ev.weights.dot((div - proj).cwiseAbs2()));
    const double ref = std::sqrt(ev.weights.dot(proj.cwiseAbs2()));
    a.divergence = std::max(a.divergence, err / (1.0 + ref));
  }
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fc = mesh.facet(f);
    const FacetValues f0 = facet_values(mesh, fc.elements[0], fc.local_index[0], r, p, quad);
    const Eigen::VectorXd n0 = f0.normal.x() * (f0.phi * flux.cx.col(fc.elements[0])) +
                               f0.normal.y() * (f0.phi * flux.cy.col(fc.elements[0]));
    if (!fc.is_boundary()) {
      const FacetValues f1 = facet_values(mesh, fc.elements[1], fc.local_index[1], r, p, quad);
      const Eigen::VectorXd n1 = f1.normal.x() * (f1.phi * flux.cx.col(fc.elements[1])) +
                                 f1.normal.y() * (f1.phi * flux.cy.col(fc.elements[1]));
      const double jump = std::sqrt(f0.weights.dot((n0 + n1).cwiseAbs2()));
      const double ref = std::sqrt(f0.weights.dot(n0.cwiseAbs2()));
      a.normal_jump = std::max(a.normal_jump, jump / (1.0 + ref));
    } else if (fc.is_neumann()) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(n0.size());
      if (!normal_flux.is_zero())
        g = f0.psi * project_edge(normal_flux, mesh, f, p).coeffs;
      const double err = std::sqrt(f0.weights.dot((n0 - g).cwiseAbs2()));
      const double ref = std::sqrt(f0.weights.dot(g.cwiseAbs2()));
      a.neumann = std::max(a.neumann, err / (1.0 + ref));
    }
  }
  return a;
}

ReconstructionAudit audit_potential(const ContinuousPotential& pot, const ScalarField& dirichlet) {
  const Mesh& mesh = pot.mesh();
  const LagrangeNumbering& num = pot.numbering();
  const LineRule& rule = line_rule(2 * pot.degree() + 4);
  ReconstructionAudit a;
  // Each element's own polynomial must reproduce the shared nodal values.
  for (int k = 0; k < mesh.num_elements(); ++k)
    for (int id : num.element_nodes[k]) {
      const double v = pot.nodal[id];
      a.continuity =
          std::max(a.continuity, std::abs(pot.value(k, num.points[id]) - v) / (1.0 + std::abs(v)));
    }
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fc = mesh.facet(f);
    for (double s : rule.points) {
      const Point x = facet_point(mesh, f, s);
      const double u0 = pot.value(fc.elements[0], x);
      if (!fc.is_boundary()) {
        const double u1 = pot.value(fc.elements[1], x);
        a.continuity = std::max(a.continuity, std::abs(u0 - u1) / (1.0 + std::abs(u0)));
      } else if (fc.is_dirichlet()) {
        const double g = dirichlet.is_zero() ? 0.0 : dirichlet(x);
        a.dirichlet = std::max(a.dirichlet, std::abs(u0 - g) / (1.0 + std::abs(g)));
      }
    }
  }
  return a;
}

ReconstructionAudit audit(const Reconstruction& rec, const ScalarField& source,
                          const ScalarField& normal_flux, const ScalarField& dirichlet) {
  ReconstructionAudit a = audit_flux(rec.flux, source, normal_flux);
  const ReconstructionAudit b = audit_potential(rec.potential, dirichlet);
  a.dirichlet = b.dirichlet;
  a.continuity = b.continuity;
  return a;
}

} // namespace hdgqoi
