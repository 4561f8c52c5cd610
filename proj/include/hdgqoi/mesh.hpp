#pragma once

#include "hdgqoi/fields.hpp"

#include <array>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace hdgqoi {

enum class BoundaryTag : char { Dirichlet = 'D', Neumann = 'N' };

using EdgeKey = std::pair<int, int>; // sorted vertex pair

inline EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

/// A mesh edge. `vertices` are ordered so that `elements[0]` (the lower
/// element index) lies to the left; the stored unit normal points out of
/// `elements[0]`, i.e. toward `elements[1]` or out of the domain.
struct Facet {
  std::array<int, 2> vertices{};
  std::array<int, 2> elements{-1, -1};
  std::array<int, 2> local_index{-1, -1}; // local facet id within each element
  std::optional<BoundaryTag> tag;         // set iff boundary facet

  bool is_boundary() const { return elements[1] < 0; }
  bool is_dirichlet() const { return tag == BoundaryTag::Dirichlet; }
  bool is_neumann() const { return tag == BoundaryTag::Neumann; }
};

struct ElementGeometry {
  double area = 0.0;
  double diameter = 0.0;
  std::array<double, 3> facet_length{};
  /// max over x on facet i of |x - x_i|, x_i the vertex opposite facet i.
  std::array<double, 3> opposite_distance{};
};

/// Conforming triangulation with tagged boundary and piecewise-constant
/// diffusivity. Immutable after construction.
///
/// Local facet i of an element is the edge opposite its local vertex i.
class Mesh {
public:
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> elements,
       std::vector<int> regions, std::map<int, double> nu,
       const std::map<EdgeKey, BoundaryTag>& boundary_tags);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_facets() const { return static_cast<int>(facets_.size()); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3>& element(int k) const { return elements_[k]; }
  const std::vector<std::array<int, 3>>& elements() const { return elements_; }
  const Facet& facet(int f) const { return facets_[f]; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::array<int, 3>& element_facets(int k) const { return element_facets_[k]; }

  int region(int k) const { return regions_[k]; }
  const std::vector<int>& regions() const { return regions_; }
  const std::map<int, double>& nu_map() const { return nu_; }
  double nu(int k) const { return nu_.at(regions_[k]); }

  ElementGeometry geometry(int k) const;
  double area(int k) const;
  Point centroid(int k) const;
  double facet_length(int f) const;
  /// Unit normal of facet f pointing out of element k (k must be adjacent).
  Vec2 outward_normal(int f, int k) const;

  /// Boundary tags keyed by sorted vertex pair.
  std::map<EdgeKey, BoundaryTag> boundary_tags() const;

  double total_area() const;

private:
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> elements_;
  std::vector<int> regions_;
  std::map<int, double> nu_;
  std::vector<Facet> facets_;
  std::vector<std::array<int, 3>> element_facets_;
};

/// Conformity audit: every interior facet shared by exactly two elements that
/// list the same two vertices, no vertex lying in the interior of another
/// element's edge, positive areas, boundary tags only on boundary facets.
/// Returns an empty string when the mesh passes, a description otherwise.
std::string check_conformity(const Mesh& mesh);

} // namespace hdgqoi
