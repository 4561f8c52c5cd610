#include "hdgqoi/refine.hpp"

#include "hdgqoi/errors.hpp"

#include <numeric>
#include <set>

namespace hdgqoi {

namespace {

void validate_marks(const Mesh& mesh, const std::vector<int>& marks) {
  for (int k : marks)
    if (k < 0 || k >= mesh.num_elements())
      throw InputError("refinement mark references nonexistent element " + std::to_string(k));
}

// Output builder shared by both refiners: owns the growing vertex list and
// the boundary tags of split edges.
struct Builder {
  const Mesh& mesh;
  std::vector<Point> vertices;
  std::map<EdgeKey, int> midpoint;
  std::map<EdgeKey, BoundaryTag> tags;
  std::vector<std::array<int, 3>> elements;
  std::vector<int> regions;

  explicit Builder(const Mesh& m)
      : mesh(m), vertices(m.vertices()), tags(m.boundary_tags()) {}

  int mid(int a, int b) {
    const EdgeKey key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end())
      return it->second;
    const int v = static_cast<int>(vertices.size());
    vertices.push_back(0.5 * (vertices[a] + vertices[b]));
    midpoint.emplace(key, v);
    if (auto t = tags.find(key); t != tags.end()) {
      const BoundaryTag tag = t->second;
      tags.erase(t);
      tags.emplace(edge_key(a, v), tag);
      tags.emplace(edge_key(v, b), tag);
    }
    return v;
  }

  void add(int a, int b, int c, int region) {
    elements.push_back({a, b, c});
    regions.push_back(region);
  }

  Mesh finish() {
    return Mesh(std::move(vertices), std::move(elements), std::move(regions), mesh.nu_map(),
                tags);
  }
};

void element_edges_marked(const Mesh& mesh, int k, const std::set<EdgeKey>& marked,
                          std::array<bool, 3>& flags) {
  const auto& e = mesh.element(k);
  for (int i = 0; i < 3; ++i)
    flags[i] = marked.count(edge_key(e[(i + 1) % 3], e[(i + 2) % 3])) > 0;
}

} // namespace

std::vector<int> all_elements(const Mesh& mesh) {
  std::vector<int> out(mesh.num_elements());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

Mesh refine(const Mesh& mesh, const std::vector<int>& marks, Refiner refiner) {
  return refiner == Refiner::Red ? refine_red(mesh, marks) : refine_bisection(mesh, marks);
}

Refiner parse_refiner(const std::string& name) {
  if (name == "red")
    return Refiner::Red;
  if (name == "bisect" || name == "bisection")
    return Refiner::Bisection;
  throw InputError("unknown refiner '" + name + "' (expected red or bisect)");
}

const char* refiner_name(Refiner refiner) { return refiner == Refiner::Red ? "red" : "bisect"; }

int longest_local_facet(const Mesh& mesh, int k) {
  const auto& e = mesh.element(k);
  int best = -1;
  double best_len = -1.0;
  EdgeKey best_key{};
  for (int i = 0; i < 3; ++i) {
    const int a = e[(i + 1) % 3], b = e[(i + 2) % 3];
    const double len = (mesh.vertex(b) - mesh.vertex(a)).squaredNorm();
    const EdgeKey key = edge_key(a, b);
    if (best < 0 || len > best_len * (1.0 + 1e-12)) {
      best = i, best_len = len, best_key = key;
    } else if (len >= best_len * (1.0 - 1e-12) && key < best_key) {
      best = i, best_len = std::max(len, best_len), best_key = key;
    }
  }
  return best;
}

Mesh refine_red(const Mesh& mesh, const std::vector<int>& marks) {
  validate_marks(mesh, marks);
  if (marks.empty())
    return mesh;

  std::set<EdgeKey> marked;
  auto mark_all_edges = [&](int k) {
    const auto& e = mesh.element(k);
    bool changed = false;
    for (int i = 0; i < 3; ++i)
      changed |= marked.insert(edge_key(e[(i + 1) % 3], e[(i + 2) % 3])).second;
    return changed;
  };
  for (int k : marks)
    mark_all_edges(k);

  // Closure: two or more split edges turn an element red.
  for (bool changed = true; changed;) {
    changed = false;
    for (int k = 0; k < mesh.num_elements(); ++k) {
      std::array<bool, 3> f{};
      element_edges_marked(mesh, k, marked, f);
      const int count = f[0] + f[1] + f[2];
      if (count == 2)
        changed |= mark_all_edges(k);
    }
  }

  Builder out(mesh);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& e = mesh.element(k);
    const int region = mesh.region(k);
    std::array<bool, 3> f{};
    element_edges_marked(mesh, k, marked, f);
    const int count = f[0] + f[1] + f[2];
    if (count == 0) {
      out.add(e[0], e[1], e[2], region);
    } else if (count == 3) {
      const int m0 = out.mid(e[1], e[2]); // opposite vertex 0
      const int m1 = out.mid(e[2], e[0]);
      const int m2 = out.mid(e[0], e[1]);
      out.add(e[0], m2, m1, region);
      out.add(m2, e[1], m0, region);
      out.add(m1, m0, e[2], region);
      out.add(m0, m1, m2, region);
    } else {
      // Green: split the single marked edge toward the opposite vertex.
      const int i = f[0] ? 0 : (f[1] ? 1 : 2);
      const int a = e[(i + 1) % 3], b = e[(i + 2) % 3];
      const int m = out.mid(a, b);
      out.add(e[i], a, m, region);
      out.add(e[i], m, b, region);
    }
  }
  return out.finish();
}

Mesh refine_bisection(const Mesh& mesh, const std::vector<int>& marks) {
  validate_marks(mesh, marks);
  if (marks.empty())
    return mesh;

  const int ne = mesh.num_elements();
  std::vector<EdgeKey> longest(ne);
  for (int k = 0; k < ne; ++k) {
    const auto& e = mesh.element(k);
    const int i = longest_local_facet(mesh, k);
    longest[k] = edge_key(e[(i + 1) % 3], e[(i + 2) % 3]);
  }

  std::set<EdgeKey> marked;
  for (int k : marks)
    marked.insert(longest[k]);

  // Closure: an element with any split edge must also split its longest one.
  for (bool changed = true; changed;) {
    changed = false;
    for (int k = 0; k < ne; ++k) {
      if (marked.count(longest[k]))
        continue;
      std::array<bool, 3> f{};
      element_edges_marked(mesh, k, marked, f);
      if (f[0] || f[1] || f[2])
        changed |= marked.insert(longest[k]).second;
    }
  }

  Builder out(mesh);
  for (int k = 0; k < ne; ++k) {
    const auto& e = mesh.element(k);
    const int region = mesh.region(k);
    std::array<bool, 3> f{};
    element_edges_marked(mesh, k, marked, f);
    if (!(f[0] || f[1] || f[2])) {
      out.add(e[0], e[1], e[2], region);
      continue;
    }
    // Rotate so the longest edge is local facet 0: vertices (top, a, b) with
    // the longest edge a-b.
    const int L = longest_local_facet(mesh, k);
    const int top = e[L], a = e[(L + 1) % 3], b = e[(L + 2) % 3];
    const bool split_b_top = f[(L + 1) % 3]; // edge (b, top), opposite a
    const bool split_top_a = f[(L + 2) % 3]; // edge (top, a), opposite b
    const int m = out.mid(a, b);
    // Child (top, a, m) contains edge top-a; child (top, m, b) contains b-top.
    if (split_top_a) {
      const int ma = out.mid(top, a);
      out.add(m, top, ma, region);
      out.add(m, ma, a, region);
    } else {
      out.add(top, a, m, region);
    }
    if (split_b_top) {
      const int mb = out.mid(b, top);
      out.add(m, b, mb, region);
      out.add(m, mb, top, region);
    } else {
      out.add(top, m, b, region);
    }
  }
  return out.finish();
}

} // namespace hdgqoi
