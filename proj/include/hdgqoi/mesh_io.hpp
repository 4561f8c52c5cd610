#pragma once

#include "hdgqoi/mesh.hpp"

#include <iosfwd>
#include <string>

namespace hdgqoi {

// Plain-text mesh format:
//   nv ne nf
//   x y                 (nv lines)
//   v0 v1 v2 region     (ne lines, counter-clockwise)
//   v0 v1 tag           (nf boundary facets, tag D or N)
// Interior facets are derived on read and never written.

void write_mesh(std::ostream& os, const Mesh& mesh);
void write_mesh(const std::string& path, const Mesh& mesh);

/// `nu` maps region id to diffusivity; regions missing from it get 1.
Mesh read_mesh(std::istream& is, const std::map<int, double>& nu = {});
Mesh read_mesh(const std::string& path, const std::map<int, double>& nu = {});

} // namespace hdgqoi
