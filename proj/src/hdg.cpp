#include "hdgqoi/hdg.hpp"

#include "hdgqoi/basis.hpp"
#include "hdgqoi/element.hpp"
#include "hdgqoi/errors.hpp"
#include "hdgqoi/projection.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <sstream>

namespace hdgqoi {

OutputFunctional OutputFunctional::scaled(double c) const {
  return {source.scaled(c), dirichlet.scaled(c), neumann.scaled(c)};
}

ProblemData adjoint_data(const OutputFunctional& out) {
  return {out.source, out.dirichlet, out.neumann.scaled(-1.0)};
}

HDGSolution::HDGSolution(std::shared_ptr<const Mesh> mesh, int degree, std::vector<double> tau)
    : mesh_(std::move(mesh)), degree_(degree), tau_(std::move(tau)) {
  const int n = dim_p(degree_);
  const int ne = mesh_->num_elements();
  u = Eigen::MatrixXd::Zero(n, ne);
  qx = Eigen::MatrixXd::Zero(n, ne);
  qy = Eigen::MatrixXd::Zero(n, ne);
  trace = Eigen::MatrixXd::Zero(degree_ + 1, mesh_->num_facets());
  flux = Eigen::MatrixXd::Zero(3 * (degree_ + 1), ne);
}

double HDGSolution::u_at(int k, const Point& x) const {
  return point_values(*mesh_, k, degree_, x).phi.dot(u.col(k));
}

Vec2 HDGSolution::q_at(int k, const Point& x) const {
  const Eigen::VectorXd phi = point_values(*mesh_, k, degree_, x).phi;
  return Vec2(phi.dot(qx.col(k)), phi.dot(qy.col(k)));
}

double HDGSolution::trace_at(int f, double s) const {
  return facet_basis(*mesh_, f, degree_, s).dot(trace.col(f));
}

double HDGSolution::flux_at(int k, int local, double s) const {
  const int f = mesh_->element_facets(k)[local];
  return facet_basis(*mesh_, f, degree_, s).dot(flux.col(k).segment(local * (degree_ + 1),
                                                                    degree_ + 1));
}

namespace {

// Local HDG operator on one element. Unknowns X = [qx; qy; u] solve
// A X = F + G L with L the stacked facet traces; the flux moments on the
// facets are E X - tau L.
struct LocalOperator {
  Eigen::MatrixXd ainv_g; // 3n x 3m
  Eigen::VectorXd ainv_f; // 3n
  Eigen::MatrixXd e;      // 3m x 3n
  double tau = 1.0;

  Eigen::MatrixXd condensed() const {
    const int m = static_cast<int>(e.rows());
    return tau * Eigen::MatrixXd::Identity(m, m) - e * ainv_g;
  }
  Eigen::VectorXd condensed_rhs() const { return e * ainv_f; }
};

LocalOperator build_local(const Mesh& mesh, int k, int p, double tau, const ScalarField& f,
                          int data_degree) {
  const int n = dim_p(p);
  const int mp = p + 1;
  const int m = 3 * mp;
  const double nu = mesh.nu(k);

  const ElementValues ev = element_values(mesh, k, p, std::max(data_degree, 2 * p));
  const Eigen::MatrixXd wphi = ev.weights.asDiagonal() * ev.phi;
  const Eigen::MatrixXd dx = wphi.transpose() * ev.dphi_x; // (dx phi_j, phi_i)
  const Eigen::MatrixXd dy = wphi.transpose() * ev.dphi_y;

  Eigen::VectorXd fw(ev.points.size());
  for (std::size_t q = 0; q < ev.points.size(); ++q)
    fw[q] = f.is_zero() ? 0.0 : f.checked(ev.points[q], "source");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3 * n, m);
  LocalOperator op;
  op.tau = tau;
  op.e = Eigen::MatrixXd::Zero(m, 3 * n);
  a.block(0, 0, n, n) = Eigen::MatrixXd::Identity(n, n) / nu;
  a.block(n, n, n, n) = Eigen::MatrixXd::Identity(n, n) / nu;
  a.block(0, 2 * n, n, n) = -dx.transpose();
  a.block(n, 2 * n, n, n) = -dy.transpose();
  a.block(2 * n, 0, n, n) = dx;
  a.block(2 * n, n, n, n) = dy;

  for (int i = 0; i < 3; ++i) {
    const FacetValues fv = facet_values(mesh, k, i, p, p, 2 * p + 2);
    const Eigen::MatrixXd wphi_e = fv.weights.asDiagonal() * fv.phi;
    const Eigen::MatrixXd eb = wphi_e.transpose() * fv.psi; // <psi_a, phi_i>
    a.block(2 * n, 2 * n, n, n) += tau * (wphi_e.transpose() * fv.phi);
    g.block(0, i * mp, n, mp) = -fv.normal.x() * eb;
    g.block(n, i * mp, n, mp) = -fv.normal.y() * eb;
    g.block(2 * n, i * mp, n, mp) = tau * eb;
    op.e.block(i * mp, 0, mp, n) = fv.normal.x() * eb.transpose();
    op.e.block(i * mp, n, mp, n) = fv.normal.y() * eb.transpose();
    op.e.block(i * mp, 2 * n, mp, n) = tau * eb.transpose();
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * n);
  rhs.segment(2 * n, n) = wphi.transpose() * fw;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) {
    std::ostringstream msg;
    msg << "singular HDG local solver on element " << k << " (rcond " << rc << ")";
    throw SolverError(msg.str());
  }
  op.ainv_g = lu.solve(g);
  op.ainv_f = lu.solve(rhs);
  return op;
}

std::vector<double> element_tau(const Mesh& mesh, const HdgOptions& options) {
  std::vector<double> tau(mesh.num_elements(), options.tau);
  if (!options.tau_per_element.empty()) {
    if (static_cast<int>(options.tau_per_element.size()) != mesh.num_elements())
      throw InputError("per-element stabilization has the wrong length");
    tau = options.tau_per_element;
  }
  for (double t : tau)
    if (!(t > 0.0))
      throw InputError("stabilization parameter must be strictly positive");
  return tau;
}

struct Assembly {
  SkeletonSystem system;
  std::vector<LocalOperator> local;
  Eigen::MatrixXd dirichlet_trace; // (p+1) x nf, zero off Gamma_D
};

Assembly assemble(const std::shared_ptr<const Mesh>& mesh_ptr, const ProblemData& data,
                  const HdgOptions& options) {
  const Mesh& mesh = *mesh_ptr;
  const int p = options.degree;
  if (p < 0)
    throw InputError("polynomial degree must be non-negative");
  const int mp = p + 1;
  const int nf = mesh.num_facets();
  const int data_deg = options.data_degree();
  const std::vector<double> tau = element_tau(mesh, options);

  Assembly out;
  out.system.facet_offset.assign(nf, -1);
  out.dirichlet_trace = Eigen::MatrixXd::Zero(mp, nf);
  int ndof = 0;
  for (int f = 0; f < nf; ++f) {
    const Facet& fc = mesh.facet(f);
    if (fc.is_dirichlet()) {
      if (!data.dirichlet.is_zero())
        out.dirichlet_trace.col(f) = project_edge(data.dirichlet, mesh, f, p, data_deg).coeffs;
    } else {
      out.system.facet_offset[f] = ndof;
      ndof += mp;
    }
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ndof);
  std::vector<Eigen::Triplet<double>> triplets;
  out.local.reserve(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    out.local.push_back(build_local(mesh, k, p, tau[k], data.source, data_deg));
    const LocalOperator& op = out.local.back();
    const Eigen::MatrixXd s = op.condensed();
    const Eigen::VectorXd r = op.condensed_rhs();
    const auto& facets = mesh.element_facets(k);
    for (int i = 0; i < 3; ++i) {
      const int row0 = out.system.facet_offset[facets[i]];
      if (row0 < 0)
        continue;
      for (int a = 0; a < mp; ++a) {
        rhs[row0 + a] += r[i * mp + a];
        for (int j = 0; j < 3; ++j) {
          const int col0 = out.system.facet_offset[facets[j]];
          for (int b = 0; b < mp; ++b) {
            const double v = s(i * mp + a, j * mp + b);
            if (col0 >= 0)
              triplets.emplace_back(row0 + a, col0 + b, v);
            else
              rhs[row0 + a] -= v * out.dirichlet_trace(b, facets[j]);
          }
        }
      }
    }
  }
  for (int f = 0; f < nf; ++f) {
    const Facet& fc = mesh.facet(f);
    if (fc.is_neumann() && !data.neumann.is_zero())
      rhs.segment(out.system.facet_offset[f], mp) -=
          project_edge(data.neumann, mesh, f, p, data_deg).coeffs;
  }
  out.system.matrix.resize(ndof, ndof);
  out.system.matrix.setFromTriplets(triplets.begin(), triplets.end());
  out.system.rhs = std::move(rhs);
  return out;
}

} // namespace

SkeletonSystem assemble_skeleton(std::shared_ptr<const Mesh> mesh, const ProblemData& data,
                                 const HdgOptions& options) {
  return assemble(mesh, data, options).system;
}

HDGSolution solve_primal(std::shared_ptr<const Mesh> mesh_ptr, const ProblemData& data,
                         const HdgOptions& options) {
  Assembly asmb = assemble(mesh_ptr, data, options);
  const Mesh& mesh = *mesh_ptr;
  const int p = options.degree;
  const int mp = p + 1;
  const int n = dim_p(p);

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(asmb.system.rhs.size());
  if (lambda.size() > 0) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(asmb.system.matrix);
    if (solver.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "skeleton factorization failed (" << asmb.system.rhs.size() << " unknowns)";
      throw SolverError(msg.str());
    }
    lambda = solver.solve(asmb.system.rhs);
    const Eigen::ArrayXd d = solver.vectorD().array();
    if (solver.info() != Eigen::Success || !(d > 0.0).all() || !lambda.allFinite()) {
      std::ostringstream msg;
      msg << "skeleton solve failed: pivot range [" << d.minCoeff() << ", " << d.maxCoeff()
          << "]";
      throw SolverError(msg.str());
    }
  }

  HDGSolution sol(mesh_ptr, p, element_tau(mesh, options));
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const int off = asmb.system.facet_offset[f];
    sol.trace.col(f) = off < 0 ? Eigen::VectorXd(asmb.dirichlet_trace.col(f))
                               : Eigen::VectorXd(lambda.segment(off, mp));
  }
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& facets = mesh.element_facets(k);
    Eigen::VectorXd lk(3 * mp);
    for (int i = 0; i < 3; ++i)
      lk.segment(i * mp, mp) = sol.trace.col(facets[i]);
    const LocalOperator& op = asmb.local[k];
    const Eigen::VectorXd x = op.ainv_f + op.ainv_g * lk;
    sol.qx.col(k) = x.segment(0, n);
    sol.qy.col(k) = x.segment(n, n);
    sol.u.col(k) = x.segment(2 * n, n);
    sol.flux.col(k) = op.e * x - op.tau * lk;
  }
  return sol;
}

HDGSolution solve_adjoint(std::shared_ptr<const Mesh> mesh, const OutputFunctional& out,
                          const HdgOptions& options) {
  return solve_primal(std::move(mesh), adjoint_data(out), options);
}

double raw_output(const HDGSolution& sol, const OutputFunctional& out, int quad_degree) {
  const Mesh& mesh = sol.mesh();
  const int p = sol.degree();
  if (quad_degree < 0)
    quad_degree = 2 * p + 4;
  double s = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    if (!out.source.is_zero()) {
      const ElementValues ev = element_values(mesh, k, p, quad_degree);
      const Eigen::VectorXd uq = ev.phi * sol.u.col(k);
      for (std::size_t q = 0; q < ev.points.size(); ++q)
        s += ev.weights[q] * out.source.checked(ev.points[q], "output source") * uq[q];
    }
    for (int i = 0; i < 3; ++i) {
      const int f = mesh.element_facets(k)[i];
      const Facet& fc = mesh.facet(f);
      if (fc.is_dirichlet() && !out.dirichlet.is_zero()) {
        const FacetValues fv = facet_values(mesh, k, i, p, p, quad_degree);
        const Eigen::VectorXd flux = fv.psi * sol.flux.col(k).segment(i * (p + 1), p + 1);
        for (int q = 0; q < fv.weights.size(); ++q)
          s += fv.weights[q] * out.dirichlet.checked(fv.points[q], "output Dirichlet datum") *
               flux[q];
      } else if (fc.is_neumann() && !out.neumann.is_zero()) {
        const FacetValues fv = facet_values(mesh, k, i, p, p, quad_degree);
        const Eigen::VectorXd uq = fv.phi * sol.u.col(k);
        for (int q = 0; q < fv.weights.size(); ++q)
          s += fv.weights[q] * out.neumann.checked(fv.points[q], "output Neumann datum") * uq[q];
      }
    }
  }
  return s;
}

double local_equation_residual(const HDGSolution& sol, const ProblemData& data, int quad_degree) {
  const Mesh& mesh = sol.mesh();
  const int p = sol.degree();
  const int n = dim_p(p);
  if (quad_degree < 0)
    quad_degree = 2 * p + 4;
  double worst = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ElementValues ev = element_values(mesh, k, p, quad_degree);
    const Eigen::VectorXd u = ev.phi * sol.u.col(k);
    const Eigen::VectorXd qx = ev.phi * sol.qx.col(k);
    const Eigen::VectorXd qy = ev.phi * sol.qy.col(k);
    const double nu = mesh.nu(k);
    Eigen::VectorXd r1x = Eigen::VectorXd::Zero(n), r1y = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r2 = Eigen::VectorXd::Zero(n);
    double scale = 1.0;
    for (std::size_t q = 0; q < ev.points.size(); ++q) {
      const double w = ev.weights[q];
      const double f = data.source.is_zero() ? 0.0 : data.source(ev.points[q]);
      scale = std::max(scale, std::abs(f));
      // (nu^{-1} q, v) - (u, div v)
      r1x += w * (qx[q] / nu * ev.phi.row(q).transpose() - u[q] * ev.dphi_x.row(q).transpose());
      r1y += w * (qy[q] / nu * ev.phi.row(q).transpose() - u[q] * ev.dphi_y.row(q).transpose());
      // -(q, grad w) - (f, w)
      r2 -= w * (qx[q] * ev.dphi_x.row(q).transpose() + qy[q] * ev.dphi_y.row(q).transpose() +
                 f * ev.phi.row(q).transpose());
    }
    for (int i = 0; i < 3; ++i) {
      const FacetValues fv = facet_values(mesh, k, i, p, p, quad_degree);
      const Eigen::VectorXd uhat = fv.psi * sol.trace.col(fv.facet);
      const Eigen::VectorXd qhat = fv.psi * sol.flux.col(k).segment(i * (p + 1), p + 1);
      for (int q = 0; q < fv.weights.size(); ++q) {
        const double w = fv.weights[q];
        r1x += w * uhat[q] * fv.normal.x() * fv.phi.row(q).transpose();
        r1y += w * uhat[q] * fv.normal.y() * fv.phi.row(q).transpose();
        r2 += w * qhat[q] * fv.phi.row(q).transpose();
      }
      // The numerical flux itself must equal q.n + tau (u - u^).
      const Eigen::VectorXd u_e = fv.phi * sol.u.col(k);
      const Eigen::VectorXd qn = fv.normal.x() * (fv.phi * sol.qx.col(k)) +
                                 fv.normal.y() * (fv.phi * sol.qy.col(k));
      const Eigen::VectorXd expect = qn + sol.tau(k) * (u_e - uhat);
      worst = std::max(worst, (qhat - expect).cwiseAbs().maxCoeff() / scale);
    }
    worst = std::max({worst, r1x.cwiseAbs().maxCoeff() / scale,
                      r1y.cwiseAbs().maxCoeff() / scale, r2.cwiseAbs().maxCoeff() / scale});
  }
  return worst;
}

} // namespace hdgqoi
