#pragma once

#include "hdgqoi/mesh.hpp"

#include <Eigen/Dense>

#include <vector>

namespace hdgqoi {

/// Affine map from the reference triangle onto element k: x = origin + J xi.
struct AffineMap {
  AffineMap(const Mesh& mesh, int k);

  Point to_physical(const Eigen::Vector2d& xi) const { return origin + jac * xi; }
  Eigen::Vector2d to_reference(const Point& x) const { return jac_inv * (x - origin); }

  Point origin;
  Eigen::Matrix2d jac;
  Eigen::Matrix2d jac_inv;
  double det; // 2 |K|
};

/// Orthonormal element basis of a given degree tabulated on an element rule.
/// The physical basis is phi_i(x) = phi_ref_i(xi) / sqrt(det J), orthonormal
/// in L2(K).
struct ElementValues {
  std::vector<Point> points;
  Eigen::VectorXd weights; // physical weights
  Eigen::MatrixXd phi;     // points x members
  Eigen::MatrixXd dphi_x;
  Eigen::MatrixXd dphi_y;
};

ElementValues element_values(const Mesh& mesh, int k, int degree, int quad_degree);

/// Element and facet bases tabulated on a Gauss rule along local facet
/// `local` of element k. The facet parameter s runs from the facet's stored
/// first vertex to its second, so both neighbours see the same points.
struct FacetValues {
  int facet = -1;
  double length = 0.0;
  Vec2 normal; // outward from element k
  std::vector<Point> points;
  Eigen::VectorXd s;
  Eigen::VectorXd weights; // physical weights
  Eigen::MatrixXd phi;     // element basis, points x members
  Eigen::MatrixXd dphi_x;
  Eigen::MatrixXd dphi_y;
  Eigen::MatrixXd psi; // orthonormal facet basis, points x (facet_degree + 1)
};

FacetValues facet_values(const Mesh& mesh, int k, int local, int degree, int facet_degree,
                         int quad_degree);

/// Physical basis values and gradients at arbitrary points of element k.
struct PointValues {
  Eigen::VectorXd phi;
  Eigen::MatrixX2d grad;
};
PointValues point_values(const Mesh& mesh, int k, int degree, const Point& x);

/// Orthonormal facet basis on physical facet f at parameter s.
Eigen::VectorXd facet_basis(const Mesh& mesh, int f, int degree, double s);

/// Point on facet f at parameter s.
Point facet_point(const Mesh& mesh, int f, double s);

} // namespace hdgqoi
