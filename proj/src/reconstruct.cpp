#include "hdgqoi/reconstruct.hpp"

#include "hdgqoi/basis.hpp"
#include "hdgqoi/errors.hpp"
#include "hdgqoi/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace hdgqoi {

namespace {

std::string element_message(const char* what, int k) {
  std::ostringstream msg;
  msg << what << " on element " << k;
  return msg.str();
}

// Equispaced 1D Lagrange interpolation through values at s = j/r.
double interpolate_equispaced(const Eigen::VectorXd& values, double s) {
  const int r = static_cast<int>(values.size()) - 1;
  double sum = 0.0;
  for (int j = 0; j <= r; ++j) {
    double l = 1.0;
    for (int m = 0; m <= r; ++m)
      if (m != j)
        l *= (s * r - m) / double(j - m);
    sum += l * values[j];
  }
  return sum;
}

const Eigen::MatrixXd& nodal_vandermonde(int r) {
  static std::map<int, Eigen::MatrixXd> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto it = cache.find(r);
  if (it == cache.end()) {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& n : lagrange_nodes(r))
      pts.push_back(n.xi);
    it = cache.emplace(r, ReferenceBasis::get(r).tabulate(pts).values).first;
  }
  return it->second;
}

} // namespace

// ---------------------------------------------------------------------------
// EquilibratedFlux

EquilibratedFlux::EquilibratedFlux(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree) {
  cx = Eigen::MatrixXd::Zero(dim_p(degree_ + 1), mesh_->num_elements());
  cy = cx;
}

Vec2 EquilibratedFlux::at(int k, const Point& x) const {
  const Eigen::VectorXd phi = point_values(*mesh_, k, storage_degree(), x).phi;
  return Vec2(phi.dot(cx.col(k)), phi.dot(cy.col(k)));
}

double EquilibratedFlux::divergence_at(int k, const Point& x) const {
  const PointValues pv = point_values(*mesh_, k, storage_degree(), x);
  return pv.grad.col(0).dot(cx.col(k)) + pv.grad.col(1).dot(cy.col(k));
}

Eigen::MatrixX2d EquilibratedFlux::values(const ElementValues& ev, int k) const {
  Eigen::MatrixX2d v(ev.phi.rows(), 2);
  v.col(0) = ev.phi * cx.col(k);
  v.col(1) = ev.phi * cy.col(k);
  return v;
}

Eigen::MatrixXd normal_moment_matrix(const Mesh& mesh, int k, int local, int field_degree,
                                     int facet_degree) {
  const FacetValues fv =
      facet_values(mesh, k, local, field_degree, facet_degree, field_degree + facet_degree + 2);
  const int n = dim_p(field_degree);
  const Eigen::MatrixXd m = (fv.weights.asDiagonal() * fv.psi).transpose() * fv.phi;
  Eigen::MatrixXd out(facet_degree + 1, 2 * n);
  out.leftCols(n) = fv.normal.x() * m;
  out.rightCols(n) = fv.normal.y() * m;
  return out;
}

EquilibratedFlux reconstruct_flux(const HDGSolution& sol) {
  const Mesh& mesh = sol.mesh();
  const int p = sol.degree();
  const int r = p + 1;
  const int nr = dim_p(r);
  const int np = dim_p(p);
  const int nrt = (p + 1) * (p + 3);
  EquilibratedFlux flux(sol.mesh_ptr(), p);

  for (int k = 0; k < mesh.num_elements(); ++k) {
    // Spanning set of RT^p expressed in [P^{p+1}]^2: the first 2 dim_p(p)
    // members are the basis of [P^p]^2, the last p+1 are xt * xt^a yt^(p-a)
    // with xt the centred, scaled position.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(2 * nr, nrt);
    for (int i = 0; i < np; ++i) {
      t(i, i) = 1.0;
      t(nr + i, np + i) = 1.0;
    }
    const ElementValues ev = element_values(mesh, k, r, 2 * r + 2);
    const Point xc = mesh.centroid(k);
    const double h = mesh.geometry(k).diameter;
    for (int a = 0; a <= p; ++a) {
      Eigen::VectorXd gx(ev.points.size()), gy(ev.points.size());
      for (std::size_t q = 0; q < ev.points.size(); ++q) {
        const Vec2 xt = (ev.points[q] - xc) / h;
        const double mono = std::pow(xt.x(), p - a) * std::pow(xt.y(), a);
        gx[q] = xt.x() * mono;
        gy[q] = xt.y() * mono;
      }
      t.block(0, 2 * np + a, nr, 1) = ev.phi.transpose() * ev.weights.cwiseProduct(gx);
      t.block(nr, 2 * np + a, nr, 1) = ev.phi.transpose() * ev.weights.cwiseProduct(gy);
    }

    Eigen::MatrixXd sys(nrt, 2 * nr);
    Eigen::VectorXd rhs(nrt);
    for (int i = 0; i < 3; ++i) {
      sys.middleRows(i * (p + 1), p + 1) = normal_moment_matrix(mesh, k, i, r, p);
      rhs.segment(i * (p + 1), p + 1) = sol.flux.col(k).segment(i * (p + 1), p + 1);
    }
    const int nm = dim_p(p - 1);
    for (int i = 0; i < nm; ++i) {
      sys.row(3 * (p + 1) + i) = Eigen::RowVectorXd::Unit(2 * nr, i);
      sys.row(3 * (p + 1) + nm + i) = Eigen::RowVectorXd::Unit(2 * nr, nr + i);
      rhs[3 * (p + 1) + i] = sol.qx(i, k);
      rhs[3 * (p + 1) + nm + i] = sol.qy(i, k);
    }
    const Eigen::MatrixXd a = sys * t;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    if (!(lu.rcond() > 1e-13))
      throw SolverError(element_message("singular Raviart-Thomas system", k));
    const Eigen::VectorXd c = t * lu.solve(rhs);
    flux.cx.col(k) = c.head(nr);
    flux.cy.col(k) = c.tail(nr);
  }
  return flux;
}

Eigen::MatrixXd postprocess_potential(const HDGSolution& sol, const EquilibratedFlux& flux) {
  const Mesh& mesh = sol.mesh();
  const int r = sol.degree() + 1;
  const int nr = dim_p(r);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nr, mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ElementValues ev = element_values(mesh, k, r, 2 * r + 2);
    const Eigen::MatrixX2d sigma = flux.values(ev, k);
    const Eigen::MatrixXd wx = ev.weights.asDiagonal() * ev.dphi_x;
    const Eigen::MatrixXd wy = ev.weights.asDiagonal() * ev.dphi_y;
    const Eigen::MatrixXd stiff = wx.transpose() * ev.dphi_x + wy.transpose() * ev.dphi_y;
    const Eigen::VectorXd rhs =
        -(wx.transpose() * sigma.col(0) + wy.transpose() * sigma.col(1)) / mesh.nu(k);
    // Member 0 is the constant; the rest carry the gradient.
    const Eigen::LLT<Eigen::MatrixXd> llt(stiff.bottomRightCorner(nr - 1, nr - 1));
    if (llt.info() != Eigen::Success)
      throw SolverError(element_message("rank-deficient post-processing system", k));
    out.col(k).tail(nr - 1) = llt.solve(rhs.tail(nr - 1));
    out(0, k) = sol.u(0, k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lagrange numbering and the continuous potential

LagrangeNumbering::LagrangeNumbering(const Mesh& mesh, int r) : degree(r) {
  if (r < 1)
    throw InputError("continuous potential needs degree >= 1");
  const int nv = mesh.num_vertices();
  const int nf = mesh.num_facets();
  const int ne = mesh.num_elements();
  const int per_edge = r - 1;
  const int per_elem = (r - 1) * (r - 2) / 2;
  num_nodes = nv + nf * per_edge + ne * per_elem;
  points.assign(num_nodes, Point::Zero());
  node_facet.assign(num_nodes, -1);
  element_nodes.assign(ne, {});
  interior_local.assign(ne, {});
  facet_nodes.assign(nf, std::vector<int>(r + 1, -1));

  const auto& nodes = lagrange_nodes(r);
  for (int k = 0; k < ne; ++k) {
    const AffineMap map(mesh, k);
    const auto& ev = mesh.element(k);
    const auto& ef = mesh.element_facets(k);
    int interior = 0;
    auto& out = element_nodes[k];
    out.reserve(nodes.size());
    for (std::size_t l = 0; l < nodes.size(); ++l) {
      const int i = nodes[l].i, j = nodes[l].j;
      const int b[3] = {r - i - j, i, j}; // r times barycentrics
      int id;
      if (b[0] == r || b[1] == r || b[2] == r) {
        id = ev[b[0] == r ? 0 : (b[1] == r ? 1 : 2)];
      } else if (b[0] == 0 || b[1] == 0 || b[2] == 0) {
        const int m = b[0] == 0 ? 0 : (b[1] == 0 ? 1 : 2);
        const int f = ef[m];
        const int first = mesh.facet(f).vertices[0];
        const int lv = ev[(m + 1) % 3] == first ? (m + 1) % 3 : (m + 2) % 3;
        const int t = r - b[lv];
        id = nv + f * per_edge + (t - 1);
        node_facet[id] = f;
        facet_nodes[f][t] = id;
      } else {
        id = nv + nf * per_edge + k * per_elem + interior++;
        interior_local[k].push_back(static_cast<int>(l));
      }
      points[id] = map.to_physical(nodes[l].xi);
      out.push_back(id);
    }
  }
  for (int f = 0; f < nf; ++f) {
    facet_nodes[f][0] = mesh.facet(f).vertices[0];
    facet_nodes[f][r] = mesh.facet(f).vertices[1];
  }
}

ContinuousPotential::ContinuousPotential(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree),
      numbering_(std::make_shared<const LagrangeNumbering>(*mesh_, degree)) {
  nodal = Eigen::VectorXd::Zero(numbering_->num_nodes);
  coeffs = Eigen::MatrixXd::Zero(dim_p(degree_), mesh_->num_elements());
}

void ContinuousPotential::sync_coefficients() {
  const Eigen::MatrixXd& n2m = nodal_to_modal(degree_);
  Eigen::VectorXd vals(n2m.cols());
  for (int k = 0; k < mesh_->num_elements(); ++k) {
    const auto& ids = numbering_->element_nodes[k];
    for (std::size_t l = 0; l < ids.size(); ++l)
      vals[l] = nodal[ids[l]];
    coeffs.col(k) = std::sqrt(2.0 * mesh_->area(k)) * (n2m * vals);
  }
}

void ContinuousPotential::set_correction(ScalarField ghat, const std::vector<int>& elements) {
  ghat_ = std::move(ghat);
  corrected_ = elements;
  correction_slot_.assign(mesh_->num_elements(), -1);
  const Eigen::MatrixXd& n2m = nodal_to_modal(degree_);
  correction_interp_.resize(dim_p(degree_), elements.size());
  Eigen::VectorXd vals(n2m.cols());
  for (std::size_t s = 0; s < elements.size(); ++s) {
    const int k = elements[s];
    correction_slot_[k] = static_cast<int>(s);
    const auto& ids = numbering_->element_nodes[k];
    for (std::size_t l = 0; l < ids.size(); ++l)
      vals[l] = ghat_->checked(numbering_->points[ids[l]], "boundary extension");
    correction_interp_.col(s) = std::sqrt(2.0 * mesh_->area(k)) * (n2m * vals);
  }
}

double ContinuousPotential::correction_value(int k, const Point& x) const {
  if (!has_correction(k))
    return 0.0;
  const Eigen::VectorXd phi = point_values(*mesh_, k, degree_, x).phi;
  return (*ghat_)(x) - phi.dot(correction_interp_.col(correction_slot_[k]));
}

Vec2 ContinuousPotential::correction_gradient(int k, const Point& x) const {
  if (!has_correction(k))
    return Vec2::Zero();
  const PointValues pv = point_values(*mesh_, k, degree_, x);
  return ghat_->grad(x) - pv.grad.transpose() * correction_interp_.col(correction_slot_[k]);
}

double ContinuousPotential::value(int k, const Point& x) const {
  return point_values(*mesh_, k, degree_, x).phi.dot(coeffs.col(k)) + correction_value(k, x);
}

Vec2 ContinuousPotential::gradient(int k, const Point& x) const {
  const PointValues pv = point_values(*mesh_, k, degree_, x);
  return pv.grad.transpose() * coeffs.col(k) + correction_gradient(k, x);
}

Eigen::VectorXd ContinuousPotential::values(const ElementValues& ev, int k) const {
  Eigen::VectorXd v = ev.phi * coeffs.col(k);
  if (has_correction(k)) {
    const Eigen::VectorXd interp = ev.phi * correction_interp_.col(correction_slot_[k]);
    for (std::size_t q = 0; q < ev.points.size(); ++q)
      v[q] += (*ghat_)(ev.points[q]) - interp[q];
  }
  return v;
}

Eigen::MatrixX2d ContinuousPotential::gradients(const ElementValues& ev, int k) const {
  Eigen::MatrixX2d g(ev.phi.rows(), 2);
  g.col(0) = ev.dphi_x * coeffs.col(k);
  g.col(1) = ev.dphi_y * coeffs.col(k);
  if (has_correction(k)) {
    const auto& c = correction_interp_.col(correction_slot_[k]);
    const Eigen::VectorXd ix = ev.dphi_x * c, iy = ev.dphi_y * c;
    for (std::size_t q = 0; q < ev.points.size(); ++q) {
      const Vec2 gq = ghat_->grad(ev.points[q]);
      g(q, 0) += gq.x() - ix[q];
      g(q, 1) += gq.y() - iy[q];
    }
  }
  return g;
}

ContinuousPotential make_continuous(const Eigen::MatrixXd& ustar,
                                    std::shared_ptr<const Mesh> mesh_ptr, int degree,
                                    const ScalarField& dirichlet) {
  const Mesh& mesh = *mesh_ptr;
  ContinuousPotential pot(mesh_ptr, degree);
  const LagrangeNumbering& num = pot.numbering();
  const Eigen::MatrixXd& vdm = nodal_vandermonde(degree);

  Eigen::VectorXd count = Eigen::VectorXd::Zero(num.num_nodes);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Eigen::VectorXd vals = vdm * ustar.col(k) / std::sqrt(2.0 * mesh.area(k));
    const auto& ids = num.element_nodes[k];
    for (std::size_t l = 0; l < ids.size(); ++l) {
      pot.nodal[ids[l]] += vals[l];
      count[ids[l]] += 1.0;
    }
  }
  pot.nodal = pot.nodal.cwiseQuotient(count);

  const LineRule& check = line_rule(2 * degree + 4);
  for (int f = 0; f < mesh.num_facets(); ++f) {
    if (!mesh.facet(f).is_dirichlet())
      continue;
    const auto& ids = num.facet_nodes[f];
    Eigen::VectorXd g(ids.size());
    for (std::size_t t = 0; t < ids.size(); ++t) {
      g[t] = dirichlet.is_zero() ? 0.0 : dirichlet.checked(num.points[ids[t]], "Dirichlet datum");
      pot.nodal[ids[t]] = g[t];
    }
    if (dirichlet.is_zero())
      continue;
    // Is g_D on this facet a polynomial of degree <= r?
    double scale = 1.0 + g.cwiseAbs().maxCoeff(), worst = 0.0;
    for (double s : check.points) {
      const double exact = dirichlet(facet_point(mesh, f, s));
      scale = std::max(scale, 1.0 + std::abs(exact));
      worst = std::max(worst, std::abs(exact - interpolate_equispaced(g, s)));
    }
    if (worst > 1e-11 * scale)
      pot.unresolved_dirichlet_facets.push_back(f);
  }
  pot.sync_coefficients();
  return pot;
}

Reconstruction reconstruct(const HDGSolution& sol, const ScalarField& dirichlet, bool optimize) {
  EquilibratedFlux flux = reconstruct_flux(sol);
  const Eigen::MatrixXd ustar = postprocess_potential(sol, flux);
  ContinuousPotential pot = make_continuous(ustar, sol.mesh_ptr(), sol.degree() + 1, dirichlet);
  if (!pot.unresolved_dirichlet_facets.empty())
    pot = enforce_dirichlet_band(std::move(pot), dirichlet, unresolved_portion(pot));
  Reconstruction rec{std::move(flux), std::move(pot)};
  if (optimize)
    rec = local_optimize(std::move(rec));
  return rec;
}

} // namespace hdgqoi
