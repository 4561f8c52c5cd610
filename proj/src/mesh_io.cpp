#include "hdgqoi/mesh_io.hpp"

#include "hdgqoi/errors.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace hdgqoi {

void write_mesh(std::ostream& os, const Mesh& mesh) {
  int nb = 0;
  for (const auto& f : mesh.facets())
    nb += f.is_boundary();
  os << mesh.num_vertices() << ' ' << mesh.num_elements() << ' ' << nb << '\n';
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices())
    os << v.x() << ' ' << v.y() << '\n';
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& e = mesh.element(k);
    os << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << mesh.region(k) << '\n';
  }
  for (const auto& f : mesh.facets())
    if (f.is_boundary())
      os << f.vertices[0] << ' ' << f.vertices[1] << ' ' << static_cast<char>(*f.tag) << '\n';
}

void write_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os)
    throw InputError("cannot open " + path + " for writing");
  write_mesh(os, mesh);
}

Mesh read_mesh(std::istream& is, const std::map<int, double>& nu) {
  int nv = 0, ne = 0, nf = 0;
  if (!(is >> nv >> ne >> nf) || nv <= 0 || ne <= 0 || nf < 0)
    throw InputError("mesh header must be 'nv ne nf' with positive counts");
  std::vector<Point> vertices(nv);
  for (int i = 0; i < nv; ++i) {
    double x, y;
    if (!(is >> x >> y))
      throw InputError("mesh: failed to read vertex " + std::to_string(i));
    vertices[i] = Point(x, y);
  }
  std::vector<std::array<int, 3>> elements(ne);
  std::vector<int> regions(ne);
  std::map<int, double> nu_map;
  for (int k = 0; k < ne; ++k) {
    if (!(is >> elements[k][0] >> elements[k][1] >> elements[k][2] >> regions[k]))
      throw InputError("mesh: failed to read element " + std::to_string(k));
    auto it = nu.find(regions[k]);
    nu_map[regions[k]] = it == nu.end() ? 1.0 : it->second;
  }
  std::map<EdgeKey, BoundaryTag> tags;
  for (int f = 0; f < nf; ++f) {
    int a, b;
    std::string tag;
    if (!(is >> a >> b >> tag))
      throw InputError("mesh: failed to read boundary facet " + std::to_string(f));
    if (tag == "D")
      tags[edge_key(a, b)] = BoundaryTag::Dirichlet;
    else if (tag == "N")
      tags[edge_key(a, b)] = BoundaryTag::Neumann;
    else
      throw InputError("mesh: boundary tag must be D or N, got '" + tag + "'");
  }
  return Mesh(std::move(vertices), std::move(elements), std::move(regions), std::move(nu_map),
              tags);
}

Mesh read_mesh(const std::string& path, const std::map<int, double>& nu) {
  std::ifstream is(path);
  if (!is)
    throw InputError("cannot open mesh file " + path);
  return read_mesh(is, nu);
}

} // namespace hdgqoi
