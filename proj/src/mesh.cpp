#include "hdgqoi/mesh.hpp"

#include "hdgqoi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hdgqoi {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

} // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> elements,
           std::vector<int> regions, std::map<int, double> nu,
           const std::map<EdgeKey, BoundaryTag>& boundary_tags)
    : vertices_(std::move(vertices)), elements_(std::move(elements)),
      regions_(std::move(regions)), nu_(std::move(nu)) {
  const int nv = num_vertices();
  const int ne = num_elements();
  if (ne == 0)
    throw InputError("mesh has no elements");
  if (regions_.empty())
    regions_.assign(ne, 0);
  if (static_cast<int>(regions_.size()) != ne)
    throw InputError("region list size does not match element count");
  if (nu_.empty())
    nu_[0] = 1.0;

  for (int k = 0; k < ne; ++k) {
    for (int v : elements_[k])
      if (v < 0 || v >= nv)
        throw InputError("element " + std::to_string(k) + " references a missing vertex");
    const auto& e = elements_[k];
    if (!(signed_area(vertices_[e[0]], vertices_[e[1]], vertices_[e[2]]) > 0.0))
      throw InputError("element " + std::to_string(k) +
                       " does not have positive signed area");
    auto it = nu_.find(regions_[k]);
    if (it == nu_.end())
      throw InputError("no diffusivity for region " + std::to_string(regions_[k]));
    if (!(it->second > 0.0) || !std::isfinite(it->second))
      throw InputError("diffusivity must be strictly positive (region " +
                       std::to_string(regions_[k]) + ")");
  }

  std::map<EdgeKey, int> index;
  element_facets_.assign(ne, {-1, -1, -1});
  for (int k = 0; k < ne; ++k) {
    const auto& e = elements_[k];
    for (int i = 0; i < 3; ++i) {
      const int a = e[(i + 1) % 3], b = e[(i + 2) % 3];
      const EdgeKey key = edge_key(a, b);
      auto it = index.find(key);
      if (it == index.end()) {
        Facet f;
        f.vertices = {a, b};
        f.elements = {k, -1};
        f.local_index = {i, -1};
        index.emplace(key, static_cast<int>(facets_.size()));
        element_facets_[k][i] = static_cast<int>(facets_.size());
        facets_.push_back(f);
      } else {
        Facet& f = facets_[it->second];
        if (f.elements[1] >= 0)
          throw InputError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                           ") is shared by more than two elements");
        if (f.vertices[0] != b || f.vertices[1] != a)
          throw InputError("inconsistent orientation across edge (" + std::to_string(a) +
                           ", " + std::to_string(b) + ")");
        f.elements[1] = k;
        f.local_index[1] = i;
        element_facets_[k][i] = it->second;
      }
    }
  }

  bool has_dirichlet = false;
  for (auto& f : facets_) {
    if (!f.is_boundary())
      continue;
    auto it = boundary_tags.find(edge_key(f.vertices[0], f.vertices[1]));
    if (it == boundary_tags.end())
      throw InputError("boundary edge (" + std::to_string(f.vertices[0]) + ", " +
                       std::to_string(f.vertices[1]) + ") has no boundary tag");
    f.tag = it->second;
    has_dirichlet = has_dirichlet || it->second == BoundaryTag::Dirichlet;
  }
  for (const auto& [key, tag] : boundary_tags) {
    auto it = index.find(key);
    if (it == index.end())
      throw InputError("boundary tag on a non-existent edge (" + std::to_string(key.first) +
                       ", " + std::to_string(key.second) + ")");
    if (!facets_[it->second].is_boundary())
      throw InputError("boundary tag on an interior edge (" + std::to_string(key.first) +
                       ", " + std::to_string(key.second) + ")");
  }
  if (!has_dirichlet)
    throw InputError("the Dirichlet boundary must be non-empty");
}

ElementGeometry Mesh::geometry(int k) const {
  const auto& e = elements_[k];
  ElementGeometry g;
  g.area = area(k);
  for (int i = 0; i < 3; ++i) {
    const Point& a = vertices_[e[(i + 1) % 3]];
    const Point& b = vertices_[e[(i + 2) % 3]];
    const Point& opp = vertices_[e[i]];
    g.facet_length[i] = (b - a).norm();
    g.opposite_distance[i] = std::max((a - opp).norm(), (b - opp).norm());
    g.diameter = std::max(g.diameter, g.facet_length[i]);
  }
  return g;
}

double Mesh::area(int k) const {
  const auto& e = elements_[k];
  return signed_area(vertices_[e[0]], vertices_[e[1]], vertices_[e[2]]);
}

Point Mesh::centroid(int k) const {
  const auto& e = elements_[k];
  return (vertices_[e[0]] + vertices_[e[1]] + vertices_[e[2]]) / 3.0;
}

double Mesh::facet_length(int f) const {
  const auto& fc = facets_[f];
  return (vertices_[fc.vertices[1]] - vertices_[fc.vertices[0]]).norm();
}

Vec2 Mesh::outward_normal(int f, int k) const {
  const auto& fc = facets_[f];
  const Vec2 t = vertices_[fc.vertices[1]] - vertices_[fc.vertices[0]];
  Vec2 n(t.y(), -t.x());
  n /= n.norm();
  if (fc.elements[0] == k)
    return n;
  if (fc.elements[1] == k)
    return -n;
  throw std::invalid_argument("element is not adjacent to facet");
}

std::map<EdgeKey, BoundaryTag> Mesh::boundary_tags() const {
  std::map<EdgeKey, BoundaryTag> out;
  for (const auto& f : facets_)
    if (f.tag)
      out.emplace(edge_key(f.vertices[0], f.vertices[1]), *f.tag);
  return out;
}

double Mesh::total_area() const {
  double s = 0.0;
  for (int k = 0; k < num_elements(); ++k)
    s += area(k);
  return s;
}

std::string check_conformity(const Mesh& mesh) {
  std::ostringstream out;
  for (int k = 0; k < mesh.num_elements(); ++k)
    if (!(mesh.area(k) > 0.0))
      out << "element " << k << " has non-positive area\n";
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fc = mesh.facet(f);
    if (!fc.is_boundary()) {
      if (fc.tag)
        out << "interior facet " << f << " carries a boundary tag\n";
      for (int side = 0; side < 2; ++side) {
        const auto& e = mesh.element(fc.elements[side]);
        const int li = fc.local_index[side];
        const EdgeKey key = edge_key(e[(li + 1) % 3], e[(li + 2) % 3]);
        if (key != edge_key(fc.vertices[0], fc.vertices[1]))
          out << "facet " << f << " vertices disagree with element " << fc.elements[side]
              << "\n";
      }
      continue;
    }
    if (!fc.tag)
      out << "boundary facet " << f << " has no tag\n";
    // A vertex strictly inside a boundary-looking edge is a hanging node.
    const Point& a = mesh.vertex(fc.vertices[0]);
    const Point& b = mesh.vertex(fc.vertices[1]);
    const Vec2 t = b - a;
    const double len2 = t.squaredNorm();
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (v == fc.vertices[0] || v == fc.vertices[1])
        continue;
      const Vec2 d = mesh.vertex(v) - a;
      const double s = d.dot(t) / len2;
      if (s <= 1e-12 || s >= 1.0 - 1e-12)
        continue;
      const double cross = t.x() * d.y() - t.y() * d.x();
      if (std::abs(cross) <= 1e-12 * len2)
        out << "hanging vertex " << v << " on facet " << f << "\n";
    }
  }
  return out.str();
}

} // namespace hdgqoi
