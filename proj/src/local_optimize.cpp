#include "hdgqoi/basis.hpp"
#include "hdgqoi/errors.hpp"
#include "hdgqoi/reconstruct.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace hdgqoi {

namespace {

// Orthonormal basis of the flux directions that keep the divergence and every
// normal trace: div d = 0 and d.n = 0 on the boundary of element k.
Eigen::MatrixXd flux_nullspace(const Mesh& mesh, int k, int p) {
  const int r = p + 1;
  const int nr = dim_p(r);
  const int np = dim_p(p);
  Eigen::MatrixXd c(np + 3 * (r + 1), 2 * nr);
  const ElementValues ev = element_values(mesh, k, r, 2 * r + 2);
  const Eigen::MatrixXd wphi = ev.weights.asDiagonal() * ev.phi.leftCols(np);
  c.topRows(np) << wphi.transpose() * ev.dphi_x, wphi.transpose() * ev.dphi_y;
  for (int i = 0; i < 3; ++i)
    c.middleRows(np + i * (r + 1), r + 1) = normal_moment_matrix(mesh, k, i, r, r);
  // The kernel is curl of the P^{p+2} bubbles, of dimension dim_p(p-1).
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
  const int nullity = dim_p(p - 1);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int rank = 2 * nr - nullity;
  if (rank > sv.size() || sv[rank - 1] < 1e-10 * sv[0]) {
    std::ostringstream msg;
    msg << "degenerate flux constraints on element " << k;
    throw SolverError(msg.str());
  }
  return svd.matrixV().rightCols(nullity);
}

} // namespace

Reconstruction local_optimize(Reconstruction rec) {
  EquilibratedFlux& flux = rec.flux;
  ContinuousPotential& pot = rec.potential;
  const Mesh& mesh = flux.mesh();
  const int p = flux.degree();
  const int r = flux.storage_degree();
  if (pot.degree() != r)
    throw InputError("flux and potential degrees do not match");
  const int nr = dim_p(r);
  const Eigen::MatrixXd& n2m = nodal_to_modal(r);
  const LagrangeNumbering& num = pot.numbering();

  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Eigen::MatrixXd z = flux_nullspace(mesh, k, p);
    const auto& bubbles = num.interior_local[k];
    const int nz = static_cast<int>(z.cols());
    const int nb = static_cast<int>(bubbles.size());
    if (nz + nb == 0)
      continue;

    const ElementValues ev = element_values(mesh, k, r, 2 * r + 2);
    const int nq = static_cast<int>(ev.points.size());
    const double nu = mesh.nu(k);
    const Eigen::VectorXd w = (ev.weights / nu).cwiseSqrt();
    const Eigen::MatrixX2d sigma = flux.values(ev, k);
    const Eigen::MatrixX2d grad = pot.gradients(ev, k);

    // Residual sigma + nu grad u at the points, x block over y block.
    Eigen::VectorXd b(2 * nq);
    b.head(nq) = w.cwiseProduct(sigma.col(0) + nu * grad.col(0));
    b.tail(nq) = w.cwiseProduct(sigma.col(1) + nu * grad.col(1));
    const double before = b.norm();

    Eigen::MatrixXd a(2 * nq, nz + nb);
    a.topLeftCorner(nq, nz) = w.asDiagonal() * (ev.phi * z.topRows(nr));
    a.bottomLeftCorner(nq, nz) = w.asDiagonal() * (ev.phi * z.bottomRows(nr));
    // Interior nodal basis functions in modal form: column l of n2m scaled.
    const double scale = std::sqrt(2.0 * mesh.area(k));
    for (int j = 0; j < nb; ++j) {
      const Eigen::VectorXd m = scale * n2m.col(bubbles[j]);
      a.col(nz + j).head(nq) = nu * w.cwiseProduct(ev.dphi_x * m);
      a.col(nz + j).tail(nq) = nu * w.cwiseProduct(ev.dphi_y * m);
    }
    const Eigen::VectorXd y = a.colPivHouseholderQr().solve(-b);
    const double after = (b + a * y).norm();
    if (!(after <= before + 1e-12)) {
      std::ostringstream msg;
      msg << "local optimization increased the residual on element " << k;
      throw SolverError(msg.str());
    }
    const Eigen::VectorXd dflux = z * y.head(nz);
    flux.cx.col(k) += dflux.head(nr);
    flux.cy.col(k) += dflux.tail(nr);
    for (int j = 0; j < nb; ++j)
      pot.nodal[num.element_nodes[k][bubbles[j]]] += y[nz + j];
  }
  pot.sync_coefficients();
  return rec;
}

} // namespace hdgqoi
