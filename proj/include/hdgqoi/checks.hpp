#pragma once

#include "hdgqoi/fields.hpp"
#include "hdgqoi/reconstruct.hpp"

#include <string>

namespace hdgqoi {

/// Worst-case residuals of the reconstruction invariants. Flux residuals are
/// L2 norms relative to (1 + data norm); trace and continuity errors are
/// pointwise maxima relative to (1 + |value|).
struct ReconstructionAudit {
  double divergence = 0.0;  // ||div flux - Pi_K^p f||_K
  double normal_jump = 0.0; // ||[flux . n]||_e on interior facets
  double neumann = 0.0;     // ||flux . n - Pi_e^p g||_e on Neumann facets
  double dirichlet = 0.0;   // |u - g_D| at Dirichlet facet points
  double continuity = 0.0;  // |u_K - u_K'| at shared nodes and facet points

  double worst() const;
  bool passes(double tol = 1e-10) const { return worst() <= tol; }
  std::string describe() const;
};

/// `source` is the datum the flux equilibrates and `normal_flux` its
/// prescribed normal trace on Gamma_N (g_N for the primal, -g_N^O for the
/// adjoint).
ReconstructionAudit audit_flux(const EquilibratedFlux& flux, const ScalarField& source,
                               const ScalarField& normal_flux);

ReconstructionAudit audit_potential(const ContinuousPotential& pot, const ScalarField& dirichlet);

ReconstructionAudit audit(const Reconstruction& rec, const ScalarField& source,
                          const ScalarField& normal_flux, const ScalarField& dirichlet);

} // namespace hdgqoi
