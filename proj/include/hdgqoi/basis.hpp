#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hdgqoi {

/// Number of polynomials of total degree <= q in two variables.
constexpr int dim_p(int q) { return q < 0 ? 0 : (q + 1) * (q + 2) / 2; }

/// Orthonormal modal basis of P^q on the reference triangle (0,0),(1,0),(0,1).
///
/// Obtained by Gram-Schmidt on centered monomials ordered by total degree, so
/// the first dim_p(r) members span P^r for every r <= q and member 0 is the
/// constant sqrt(2).
class ReferenceBasis {
public:
  static const ReferenceBasis& get(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(coeffs_.rows()); }

  /// Values of all members at a reference point.
  Eigen::VectorXd values(const Eigen::Vector2d& xi) const;
  /// Reference gradients, one row per member.
  Eigen::MatrixX2d gradients(const Eigen::Vector2d& xi) const;

  struct Table {
    Eigen::MatrixXd values; // points x members
    Eigen::MatrixXd d_xi;
    Eigen::MatrixXd d_eta;
  };
  Table tabulate(const std::vector<Eigen::Vector2d>& points) const;

private:
  explicit ReferenceBasis(int degree);

  int degree_;
  std::vector<std::pair<int, int>> exponents_;
  Eigen::MatrixXd coeffs_; // member i = sum_j coeffs_(i, j) * monomial_j
};

/// Orthonormal Legendre basis of P^q on [0, 1]: sqrt(2k+1) P_k(2s - 1).
Eigen::VectorXd edge_basis(int degree, double s);

/// Equispaced Lagrange nodes of degree r on the reference triangle, ordered
/// by (j, i) with node (i/r, j/r), i + j <= r.
struct LagrangeNode {
  int i;
  int j;
  Eigen::Vector2d xi;
};
const std::vector<LagrangeNode>& lagrange_nodes(int r);

/// Matrix mapping nodal values at `lagrange_nodes(r)` to coefficients in
/// `ReferenceBasis::get(r)`. Cached.
const Eigen::MatrixXd& nodal_to_modal(int r);

} // namespace hdgqoi
