#include "hdgqoi/basis.hpp"

#include "hdgqoi/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace hdgqoi {

namespace {

constexpr double kShift = 1.0 / 3.0;

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k)
    r *= x;
  return r;
}

} // namespace

ReferenceBasis::ReferenceBasis(int degree) : degree_(degree) {
  if (degree < 0)
    throw std::invalid_argument("basis degree must be non-negative");
  for (int d = 0; d <= degree; ++d)
    for (int j = 0; j <= d; ++j)
      exponents_.emplace_back(d - j, j);
  const int n = static_cast<int>(exponents_.size());

  // Monomials tabulated on a rule exact for degree 2q; orthonormalize with
  // two passes of modified Gram-Schmidt in extended precision.
  const QuadratureRule& rule = triangle_rule(2 * degree);
  const int np = static_cast<int>(rule.size());
  using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  LMat mono(n, np);
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < np; ++k)
      mono(a, k) = ipow(rule.points[k].x() - kShift, exponents_[a].first) *
                   ipow(rule.points[k].y() - kShift, exponents_[a].second);

  LMat c = LMat::Identity(n, n);
  LMat vals = mono;
  auto inner = [&](int a, int b) {
    long double s = 0;
    for (int k = 0; k < np; ++k)
      s += rule.weights[k] * vals(a, k) * vals(b, k);
    return s;
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < a; ++b) {
        const long double r = inner(a, b);
        c.row(a) -= r * c.row(b);
        vals.row(a) -= r * vals.row(b);
      }
      const long double nrm = std::sqrt(inner(a, a));
      c.row(a) /= nrm;
      vals.row(a) /= nrm;
    }
  }
  coeffs_ = c.cast<double>();
}

const ReferenceBasis& ReferenceBasis::get(int degree) {
  static std::map<int, std::unique_ptr<ReferenceBasis>> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto it = cache.find(degree);
  if (it == cache.end())
    it = cache.emplace(degree, std::unique_ptr<ReferenceBasis>(new ReferenceBasis(degree)))
             .first;
  return *it->second;
}

Eigen::VectorXd ReferenceBasis::values(const Eigen::Vector2d& xi) const {
  const double s = xi.x() - kShift, t = xi.y() - kShift;
  Eigen::VectorXd mono(exponents_.size());
  for (std::size_t a = 0; a < exponents_.size(); ++a)
    mono[a] = ipow(s, exponents_[a].first) * ipow(t, exponents_[a].second);
  return coeffs_ * mono;
}

Eigen::MatrixX2d ReferenceBasis::gradients(const Eigen::Vector2d& xi) const {
  const double s = xi.x() - kShift, t = xi.y() - kShift;
  Eigen::MatrixX2d mono(exponents_.size(), 2);
  for (std::size_t a = 0; a < exponents_.size(); ++a) {
    const auto [ex, ey] = exponents_[a];
    mono(a, 0) = ex == 0 ? 0.0 : ex * ipow(s, ex - 1) * ipow(t, ey);
    mono(a, 1) = ey == 0 ? 0.0 : ey * ipow(s, ex) * ipow(t, ey - 1);
  }
  return coeffs_ * mono;
}

ReferenceBasis::Table
ReferenceBasis::tabulate(const std::vector<Eigen::Vector2d>& points) const {
  Table t;
  const int np = static_cast<int>(points.size());
  t.values.resize(np, size());
  t.d_xi.resize(np, size());
  t.d_eta.resize(np, size());
  for (int k = 0; k < np; ++k) {
    t.values.row(k) = values(points[k]).transpose();
    const Eigen::MatrixX2d g = gradients(points[k]);
    t.d_xi.row(k) = g.col(0).transpose();
    t.d_eta.row(k) = g.col(1).transpose();
  }
  return t;
}

Eigen::VectorXd edge_basis(int degree, double s) {
  Eigen::VectorXd out(degree + 1);
  const double z = 2.0 * s - 1.0;
  double p0 = 1.0, p1 = z;
  for (int k = 0; k <= degree; ++k) {
    double pk;
    if (k == 0)
      pk = 1.0;
    else if (k == 1)
      pk = z;
    else {
      pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    out[k] = std::sqrt(2.0 * k + 1.0) * pk;
  }
  return out;
}

const std::vector<LagrangeNode>& lagrange_nodes(int r) {
  static std::map<int, std::vector<LagrangeNode>> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto it = cache.find(r);
  if (it != cache.end())
    return it->second;
  std::vector<LagrangeNode> nodes;
  for (int j = 0; j <= r; ++j)
    for (int i = 0; i + j <= r; ++i)
      nodes.push_back({i, j, Eigen::Vector2d(double(i) / r, double(j) / r)});
  return cache.emplace(r, std::move(nodes)).first->second;
}

const Eigen::MatrixXd& nodal_to_modal(int r) {
  static std::map<int, Eigen::MatrixXd> cache;
  static std::mutex m;
  {
    std::lock_guard lock(m);
    auto it = cache.find(r);
    if (it != cache.end())
      return it->second;
  }
  const ReferenceBasis& basis = ReferenceBasis::get(r);
  const auto& nodes = lagrange_nodes(r);
  Eigen::MatrixXd vander(nodes.size(), basis.size());
  for (std::size_t a = 0; a < nodes.size(); ++a)
    vander.row(a) = basis.values(nodes[a].xi).transpose();
  Eigen::MatrixXd inv = vander.fullPivLu().inverse();
  std::lock_guard lock(m);
  return cache.emplace(r, std::move(inv)).first->second;
}

} // namespace hdgqoi
