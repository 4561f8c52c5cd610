#include "hdgqoi/builtin_meshes.hpp"

#include "hdgqoi/errors.hpp"

namespace hdgqoi {

namespace {

std::map<EdgeKey, BoundaryTag> tag_boundary(const std::vector<Point>& vertices,
                                            const std::vector<std::array<int, 3>>& elements,
                                            BoundaryTag tag) {
  std::map<EdgeKey, int> count;
  for (const auto& e : elements)
    for (int i = 0; i < 3; ++i)
      ++count[edge_key(e[(i + 1) % 3], e[(i + 2) % 3])];
  std::map<EdgeKey, BoundaryTag> tags;
  for (const auto& [key, c] : count)
    if (c == 1)
      tags.emplace(key, tag);
  (void)vertices;
  return tags;
}

} // namespace

Mesh unit_square_crisscross(int levels, double nu) {
  if (levels < 0)
    throw InputError("refinement levels must be non-negative");
  if (levels > 12)
    throw InputError("too many refinement levels for the criss-cross family");
  const int n = 2 << levels;
  std::vector<Point> vertices;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.emplace_back(double(i) / n, double(j) / n);
  std::vector<std::array<int, 3>> elements;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = (n + 1) * j + i, v10 = v00 + 1, v01 = v00 + n + 1, v11 = v01 + 1;
      const int c = static_cast<int>(vertices.size());
      vertices.emplace_back((i + 0.5) / n, (j + 0.5) / n);
      elements.push_back({v00, v10, c}); // bottom
      elements.push_back({v10, v11, c}); // right
      elements.push_back({v11, v01, c}); // top
      elements.push_back({v01, v00, c}); // left
    }
  }
  auto tags = tag_boundary(vertices, elements, BoundaryTag::Dirichlet);
  return Mesh(std::move(vertices), std::move(elements), {}, {{0, nu}}, tags);
}

Mesh lshape_initial(double nu) {
  std::vector<Point> vertices = {{-1, -1}, {0, -1}, {-1, 0}, {0, 0},
                                 {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
  std::vector<std::array<int, 3>> elements = {
      {0, 1, 3}, {0, 3, 2}, // [-1,0] x [-1,0], diagonal (-1,-1)-(0,0)
      {2, 3, 6}, {2, 6, 5}, // [-1,0] x [0,1],  diagonal (-1,0)-(0,1)
      {3, 4, 7}, {3, 7, 6}, // [0,1] x [0,1],   diagonal (0,0)-(1,1)
  };
  auto tags = tag_boundary(vertices, elements, BoundaryTag::Dirichlet);
  return Mesh(std::move(vertices), std::move(elements), {}, {{0, nu}}, tags);
}

Mesh unit_square_structured(int n, const std::string& neumann_sides, double nu) {
  if (n < 1)
    throw InputError("grid size must be positive");
  std::vector<Point> vertices;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.emplace_back(double(i) / n, double(j) / n);
  std::vector<std::array<int, 3>> elements;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int v00 = (n + 1) * j + i, v10 = v00 + 1, v01 = v00 + n + 1, v11 = v01 + 1;
      elements.push_back({v00, v10, v11});
      elements.push_back({v00, v11, v01});
    }
  auto tags = tag_boundary(vertices, elements, BoundaryTag::Dirichlet);
  for (auto& [key, tag] : tags) {
    const Point mid = 0.5 * (vertices[key.first] + vertices[key.second]);
    const bool left = mid.x() < 1e-12, right = mid.x() > 1 - 1e-12;
    const bool bottom = mid.y() < 1e-12, top = mid.y() > 1 - 1e-12;
    auto has = [&](char c) { return neumann_sides.find(c) != std::string::npos; };
    if ((left && has('L')) || (right && has('R')) || (bottom && has('B')) || (top && has('T')))
      tag = BoundaryTag::Neumann;
  }
  return Mesh(std::move(vertices), std::move(elements), {}, {{0, nu}}, tags);
}

} // namespace hdgqoi
