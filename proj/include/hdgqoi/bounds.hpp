#pragma once

#include "hdgqoi/hdg.hpp"
#include "hdgqoi/reconstruct.hpp"

#include <string>
#include <vector>

namespace hdgqoi {

struct PoincareConstants {
  double c1 = 0.0; // h_K / pi
  double c2 = 0.0; // trace constant of the facet
};

/// Constants of the local Poincare and trace inequalities for element
/// geometry `g` and its local facet `local`.
PoincareConstants poincare_constants(const ElementGeometry& g, int local);

struct KappaResult {
  double kappa = 1.0;
  bool degenerate = false; // a residual vanished to roundoff; kappa fell back to 1
  double primal_residual = 0.0;
  double adjoint_residual = 0.0;
};

/// kappa = ||flux_xi + nu grad xi|| / ||flux_u + nu grad u||.
KappaResult compute_kappa(const Reconstruction& primal, const Reconstruction& adjoint,
                          int quad_degree = -1);

enum class EtaMode {
  Projected, // oscillation of the data about its P^p projections
  ZeroOrder, // oscillation of the data about the flux divergence / trace
};

struct EtaBreakdown {
  // Indexed [sign][element], sign 0 for eta^- and 1 for eta^+.
  std::vector<double> flux[2];
  std::vector<double> source[2];
  std::vector<double> neumann[2];
  std::vector<double> total[2];
};

struct BoundsOptions {
  int quad_degree = -1; // negative: 2(p+1) + 4
  EtaMode mode = EtaMode::Projected;
  double kappa = 0.0; // nonzero overrides the optimal choice; must then be positive
};

/// Per-element contributions eta_K^{-/+} for a given kappa.
EtaBreakdown compute_eta(const Reconstruction& primal, const Reconstruction& adjoint,
                         const ProblemData& data, const OutputFunctional& out, double kappa,
                         const BoundsOptions& options = {});

struct BoundsResult {
  double s_minus = 0.0;
  double s_plus = 0.0;
  double s_tilde = 0.0;   // bound average (s_plus + s_minus) / 2
  double s_central = 0.0; // the estimate the bounds are built around
  double half_gap = 0.0;
  double kappa = 1.0;
  bool kappa_degenerate = false;
  double s_h = 0.0; // raw HDG output, filled in by callers
  std::vector<double> gap; // per-element contributions, summing to s_plus - s_minus
  EtaBreakdown eta;
};

BoundsResult compute_bounds(const Reconstruction& primal, const Reconstruction& adjoint,
                            const ProblemData& data, const OutputFunctional& out,
                            const BoundsOptions& options = {});

/// Bounds for exactly equilibrated reconstructions, evaluated from the
/// energy-norm form. Refuses data that are not polynomial of degree <= p.
BoundsResult theorem1_bounds(const Reconstruction& primal, const Reconstruction& adjoint,
                             const ProblemData& data, const OutputFunctional& out,
                             int quad_degree = -1);

/// Largest oscillation ||d - Pi d|| over the four data functions, relative to
/// (1 + ||d||). Zero for data polynomial of degree <= p.
double data_oscillation(const Mesh& mesh, int p, const ProblemData& data,
                        const OutputFunctional& out, int quad_degree = -1);

/// One CSV row: nel, n_edge_dofs, s_minus, s_plus, s_tilde, half_gap, kappa,
/// s_h and, when `exact` is finite, |s - s_tilde|.
std::string csv_header(bool with_exact);
std::string csv_row(const BoundsResult& b, int nel, int n_edge_dofs, double exact);

} // namespace hdgqoi
