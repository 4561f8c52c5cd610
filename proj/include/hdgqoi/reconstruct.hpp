#pragma once

#include "hdgqoi/element.hpp"
#include "hdgqoi/fields.hpp"
#include "hdgqoi/hdg.hpp"
#include "hdgqoi/mesh.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <vector>

namespace hdgqoi {

/// Flux reconstruction of RT order p, stored per element as coefficients in
/// the orthonormal basis of [P^{p+1}(K)]^2 (RT^p is a subspace). The same
/// storage holds the locally optimized flux, which leaves RT^p.
class EquilibratedFlux {
public:
  EquilibratedFlux(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  /// RT order p; divergence in P^p(K), normal traces in P^p(e).
  int degree() const { return degree_; }
  int storage_degree() const { return degree_ + 1; }

  Eigen::MatrixXd cx; // dim_p(p+1) x ne
  Eigen::MatrixXd cy;

  Vec2 at(int k, const Point& x) const;
  double divergence_at(int k, const Point& x) const;

  /// Values at the points of an element rule tabulated at storage degree.
  Eigen::MatrixX2d values(const ElementValues& ev, int k) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
};

/// Global numbering of the degree-r Lagrange nodes: mesh vertices first, then
/// r-1 nodes per facet ordered along the facet parameter, then interior
/// nodes element by element.
struct LagrangeNumbering {
  LagrangeNumbering(const Mesh& mesh, int r);

  int degree = 1;
  int num_nodes = 0;
  std::vector<Point> points;
  std::vector<std::vector<int>> element_nodes; // in lagrange_nodes(r) order
  std::vector<int> node_facet;                 // owning facet of edge nodes, else -1
  std::vector<std::vector<int>> facet_nodes;   // all nodes on each facet incl. vertices
  std::vector<std::vector<int>> interior_local; // local indices of interior nodes
};

/// Continuous piecewise P^{p+1} potential in the Lagrange nodal basis, with an
/// optional non-polynomial correction ghat - I_K ghat on some elements.
class ContinuousPotential {
public:
  ContinuousPotential(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  const LagrangeNumbering& numbering() const { return *numbering_; }

  Eigen::VectorXd nodal;  // one value per global node
  Eigen::MatrixXd coeffs; // dim_p(degree) x ne, modal form of the nodal field

  /// Dirichlet facets whose datum is not a polynomial of degree <= r; the
  /// trace there is only interpolated until a band correction is applied.
  std::vector<int> unresolved_dirichlet_facets;

  /// Recompute `coeffs` from `nodal`.
  void sync_coefficients();

  /// Attach the correction ghat - I_K ghat on the listed elements.
  void set_correction(ScalarField ghat, const std::vector<int>& elements);
  bool has_correction(int k) const { return !correction_slot_.empty() && correction_slot_[k] >= 0; }
  const std::vector<int>& corrected_elements() const { return corrected_; }
  double correction_value(int k, const Point& x) const;
  Vec2 correction_gradient(int k, const Point& x) const;

  double value(int k, const Point& x) const;
  Vec2 gradient(int k, const Point& x) const;

  /// Values and gradients at the points of an element rule tabulated at the
  /// potential degree, corrections included.
  Eigen::VectorXd values(const ElementValues& ev, int k) const;
  Eigen::MatrixX2d gradients(const ElementValues& ev, int k) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  std::shared_ptr<const LagrangeNumbering> numbering_;
  std::optional<ScalarField> ghat_;
  std::vector<int> corrected_;
  std::vector<int> correction_slot_;
  Eigen::MatrixXd correction_interp_; // dim_p(degree) x corrected, modal I_K ghat
};

/// RT^p flux whose normal moments on every facet equal those of the numerical
/// flux and whose moments against [P^{p-1}(K)]^2 equal those of q_h.
EquilibratedFlux reconstruct_flux(const HDGSolution& sol);

/// Element-wise P^{p+1} potential with grad matching -nu^{-1} flux in the
/// least-squares sense and the element mean of u_h. Returns modal
/// coefficients, dim_p(p+1) x ne.
Eigen::MatrixXd postprocess_potential(const HDGSolution& sol, const EquilibratedFlux& flux);

/// Nodal averaging of a discontinuous P^r field and Dirichlet enforcement
/// wherever the datum is a polynomial of degree <= r on the facet.
ContinuousPotential make_continuous(const Eigen::MatrixXd& ustar,
                                    std::shared_ptr<const Mesh> mesh, int degree,
                                    const ScalarField& dirichlet);

/// Straight boundary segment {x_axis = coordinate}.
struct BoundaryPortion {
  int axis = 0; // 0: x = const, 1: y = const
  double coordinate = 1.0;
};

/// Detect the straight coordinate-aligned segment holding all unresolved
/// Dirichlet facets. Throws UnsupportedError when there is none.
BoundaryPortion unresolved_portion(const ContinuousPotential& pot);

/// Exact Dirichlet enforcement on a coordinate-aligned boundary portion by a
/// linear blend of g_D across the widest element-aligned band next to it.
ContinuousPotential enforce_dirichlet_band(ContinuousPotential pot, const ScalarField& dirichlet,
                                           const BoundaryPortion& portion);

/// Band coordinate: the largest mesh line parallel to the portion, strictly
/// inside the domain, that cuts no element interior. Throws if none exists.
double band_coordinate(const Mesh& mesh, const BoundaryPortion& portion);

struct Reconstruction {
  EquilibratedFlux flux;
  ContinuousPotential potential;
};

/// Element-wise minimization of ||flux + nu grad u||_K keeping the
/// divergence, the normal traces and the boundary values of the potential.
Reconstruction local_optimize(Reconstruction rec);

/// Flux, post-processing, averaging and (if needed) the band correction.
Reconstruction reconstruct(const HDGSolution& sol, const ScalarField& dirichlet,
                           bool optimize = false);

/// Normal moments of a [P^{p+1}]^2 field on local facet `local` of element k
/// against the facet basis of degree `facet_degree`: rows are moments,
/// columns are [cx; cy] coefficients.
Eigen::MatrixXd normal_moment_matrix(const Mesh& mesh, int k, int local, int field_degree,
                                     int facet_degree);

} // namespace hdgqoi
