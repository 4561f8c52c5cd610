#include "hdgqoi/element.hpp"

#include "hdgqoi/basis.hpp"
#include "hdgqoi/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace hdgqoi {

namespace {

const Eigen::Vector2d kRefVertex[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};

struct EdgeTable {
  Eigen::VectorXd s;
  Eigen::VectorXd weights; // on [0, 1]
  ReferenceBasis::Table table;
};

const ReferenceBasis::Table& interior_table(int degree, int quad_degree) {
  static std::map<std::pair<int, int>, std::unique_ptr<ReferenceBasis::Table>> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  const auto key = std::make_pair(degree, quad_degree);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto t = std::make_unique<ReferenceBasis::Table>(
        ReferenceBasis::get(degree).tabulate(triangle_rule(quad_degree).points));
    it = cache.emplace(key, std::move(t)).first;
  }
  return *it->second;
}

const EdgeTable& edge_table(int degree, int quad_degree, int local, bool reversed) {
  using Key = std::tuple<int, int, int, bool>;
  static std::map<Key, std::unique_ptr<EdgeTable>> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  const Key key{degree, quad_degree, local, reversed};
  auto it = cache.find(key);
  if (it == cache.end()) {
    const LineRule& rule = line_rule(quad_degree);
    const int np = static_cast<int>(rule.points.size());
    auto t = std::make_unique<EdgeTable>();
    t->s.resize(np);
    t->weights.resize(np);
    Eigen::Vector2d a = kRefVertex[(local + 1) % 3], b = kRefVertex[(local + 2) % 3];
    if (reversed)
      std::swap(a, b);
    std::vector<Eigen::Vector2d> pts;
    for (int q = 0; q < np; ++q) {
      t->s[q] = rule.points[q];
      t->weights[q] = rule.weights[q];
      pts.push_back(a + rule.points[q] * (b - a));
    }
    t->table = ReferenceBasis::get(degree).tabulate(pts);
    it = cache.emplace(key, std::move(t)).first;
  }
  return *it->second;
}

void map_gradients(const AffineMap& map, double scale, const Eigen::MatrixXd& dxi,
                   const Eigen::MatrixXd& deta, Eigen::MatrixXd& dx, Eigen::MatrixXd& dy) {
  // grad_x = J^{-T} grad_xi
  const auto& ji = map.jac_inv;
  dx = scale * (ji(0, 0) * dxi + ji(1, 0) * deta);
  dy = scale * (ji(0, 1) * dxi + ji(1, 1) * deta);
}

} // namespace

AffineMap::AffineMap(const Mesh& mesh, int k) {
  const auto& e = mesh.element(k);
  origin = mesh.vertex(e[0]);
  jac.col(0) = mesh.vertex(e[1]) - origin;
  jac.col(1) = mesh.vertex(e[2]) - origin;
  det = jac.determinant();
  jac_inv = jac.inverse();
}

ElementValues element_values(const Mesh& mesh, int k, int degree, int quad_degree) {
  const AffineMap map(mesh, k);
  const QuadratureRule& rule = triangle_rule(quad_degree);
  const ReferenceBasis::Table& t = interior_table(degree, quad_degree);
  const double scale = 1.0 / std::sqrt(map.det);
  ElementValues v;
  const int np = static_cast<int>(rule.size());
  v.points.reserve(np);
  v.weights.resize(np);
  for (int q = 0; q < np; ++q) {
    v.points.push_back(map.to_physical(rule.points[q]));
    v.weights[q] = rule.weights[q] * map.det;
  }
  v.phi = scale * t.values;
  map_gradients(map, scale, t.d_xi, t.d_eta, v.dphi_x, v.dphi_y);
  return v;
}

FacetValues facet_values(const Mesh& mesh, int k, int local, int degree, int facet_degree,
                         int quad_degree) {
  const AffineMap map(mesh, k);
  const int f = mesh.element_facets(k)[local];
  const Facet& fc = mesh.facet(f);
  const bool reversed = mesh.element(k)[(local + 1) % 3] != fc.vertices[0];
  const EdgeTable& et = edge_table(degree, quad_degree, local, reversed);
  const double scale = 1.0 / std::sqrt(map.det);

  FacetValues v;
  v.facet = f;
  v.length = mesh.facet_length(f);
  v.normal = mesh.outward_normal(f, k);
  v.s = et.s;
  v.weights = et.weights * v.length;
  const int np = static_cast<int>(et.s.size());
  v.psi.resize(np, facet_degree + 1);
  const double psi_scale = 1.0 / std::sqrt(v.length);
  for (int q = 0; q < np; ++q) {
    v.points.push_back(facet_point(mesh, f, et.s[q]));
    v.psi.row(q) = psi_scale * edge_basis(facet_degree, et.s[q]).transpose();
  }
  v.phi = scale * et.table.values;
  map_gradients(map, scale, et.table.d_xi, et.table.d_eta, v.dphi_x, v.dphi_y);
  return v;
}

PointValues point_values(const Mesh& mesh, int k, int degree, const Point& x) {
  const AffineMap map(mesh, k);
  const Eigen::Vector2d xi = map.to_reference(x);
  const ReferenceBasis& basis = ReferenceBasis::get(degree);
  const double scale = 1.0 / std::sqrt(map.det);
  PointValues pv;
  pv.phi = scale * basis.values(xi);
  const Eigen::MatrixX2d g = basis.gradients(xi);
  pv.grad = scale * g * map.jac_inv; // rows: (grad_xi) J^{-1} = (J^{-T} grad_xi)^T
  return pv;
}

Eigen::VectorXd facet_basis(const Mesh& mesh, int f, int degree, double s) {
  return edge_basis(degree, s) / std::sqrt(mesh.facet_length(f));
}

Point facet_point(const Mesh& mesh, int f, double s) {
  const Facet& fc = mesh.facet(f);
  return (1.0 - s) * mesh.vertex(fc.vertices[0]) + s * mesh.vertex(fc.vertices[1]);
}

} // namespace hdgqoi
