#pragma once

#include "hdgqoi/fields.hpp"
#include "hdgqoi/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <vector>

namespace hdgqoi {

/// Data of -div(nu grad u) = f, u = g_D on Gamma_D, -nu grad u . n = g_N on Gamma_N.
struct ProblemData {
  ScalarField source;
  ScalarField dirichlet;
  ScalarField neumann;
};

/// s = (f^O, u) + <g_D^O, q.n>_{Gamma_D} + <g_N^O, u>_{Gamma_N}.
struct OutputFunctional {
  ScalarField source;
  ScalarField dirichlet;
  ScalarField neumann;

  OutputFunctional scaled(double c) const;
};

/// Data of the adjoint problem: (f^O, g_D^O, -g_N^O).
ProblemData adjoint_data(const OutputFunctional& out);

struct HdgOptions {
  int degree = 1;
  double tau = 1.0;
  /// Optional per-element stabilization overriding `tau`.
  std::vector<double> tau_per_element;
  /// Rule degree for data integrals; negative selects 2p + 4.
  int quad_degree = -1;

  int data_degree() const { return quad_degree < 0 ? 2 * degree + 4 : quad_degree; }
};

/// Element-local (u_h, q_h) in P^p(K) x [P^p(K)]^2 and the facet trace in
/// P^p(e), all in orthonormal bases. Also keeps, per element and local facet,
/// the moments of the numerical flux q^_h . n against the facet basis.
class HDGSolution {
public:
  HDGSolution(std::shared_ptr<const Mesh> mesh, int degree, std::vector<double> tau);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  double tau(int k) const { return tau_[k]; }

  // Coefficient columns, one per element / facet.
  Eigen::MatrixXd u;         // dim_p(p) x ne
  Eigen::MatrixXd qx;        // dim_p(p) x ne
  Eigen::MatrixXd qy;        // dim_p(p) x ne
  Eigen::MatrixXd trace;     // (p+1) x nf
  Eigen::MatrixXd flux;      // 3(p+1) x ne, moments of q^.n per local facet

  double u_at(int k, const Point& x) const;
  Vec2 q_at(int k, const Point& x) const;
  double trace_at(int f, double s) const;
  /// q^_h . n (outward from k) on local facet `local` at parameter s.
  double flux_at(int k, int local, double s) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  std::vector<double> tau_;
};

/// Condensed skeleton system for the non-Dirichlet trace unknowns.
struct SkeletonSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  std::vector<int> facet_offset; // first unknown of each facet, -1 on Gamma_D
};

SkeletonSystem assemble_skeleton(std::shared_ptr<const Mesh> mesh, const ProblemData& data,
                                 const HdgOptions& options);

HDGSolution solve_primal(std::shared_ptr<const Mesh> mesh, const ProblemData& data,
                         const HdgOptions& options);

HDGSolution solve_adjoint(std::shared_ptr<const Mesh> mesh, const OutputFunctional& out,
                          const HdgOptions& options);

/// s_h = l^O(u_h, q_h) with the numerical flux on the Dirichlet boundary.
double raw_output(const HDGSolution& primal, const OutputFunctional& out, int quad_degree = -1);

/// Weighted-residual audit of the two local equations on every element,
/// returned as the largest residual relative to (1 + |data|).
double local_equation_residual(const HDGSolution& sol, const ProblemData& data,
                               int quad_degree = -1);

} // namespace hdgqoi
