#pragma once

#include "hdgqoi/mesh.hpp"

#include <string>
#include <vector>

namespace hdgqoi {

/// Red refinement of the marked elements (four similar children through the
/// edge midpoints), closed by red/green refinement of neighbours so the
/// result is conforming. Boundary tags and regions are inherited.
Mesh refine_red(const Mesh& mesh, const std::vector<int>& marks);

/// Longest-edge bisection of the marked elements with recursive conforming
/// closure. Ties between equally long edges go to the edge whose sorted
/// vertex-index pair is lexicographically smallest.
Mesh refine_bisection(const Mesh& mesh, const std::vector<int>& marks);

enum class Refiner { Red, Bisection };

/// Dispatch to refine_red or refine_bisection.
Mesh refine(const Mesh& mesh, const std::vector<int>& marks, Refiner refiner);

/// All element indices of `mesh`.
std::vector<int> all_elements(const Mesh& mesh);

/// "red" or "bisect"; throws InputError otherwise.
Refiner parse_refiner(const std::string& name);
const char* refiner_name(Refiner refiner);

/// Index (0..2) of the local facet that bisection splits.
int longest_local_facet(const Mesh& mesh, int k);

} // namespace hdgqoi
