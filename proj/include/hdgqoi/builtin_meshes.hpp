#pragma once

#include "hdgqoi/mesh.hpp"

namespace hdgqoi {

/// Unit square split into n x n squares, n = 2^(levels+1), each cut by both
/// diagonals into four triangles. Level 0 has 16 triangles and 28 edges;
/// every level quadruples the element count. All Dirichlet.
Mesh unit_square_crisscross(int levels, double nu = 1.0);

/// L-shaped domain [-1,1]^2 minus (0,1)x(-1,0) as three unit squares, each
/// split by its lower-left to upper-right diagonal. All Dirichlet.
Mesh lshape_initial(double nu = 1.0);

/// Unit square as an n x n grid of squares each split by the diagonal from
/// lower-left to upper-right. `neumann_sides` is a subset of "LRBT" naming
/// sides (x=0, x=1, y=0, y=1) tagged Neumann; the rest are Dirichlet.
Mesh unit_square_structured(int n, const std::string& neumann_sides = "", double nu = 1.0);

} // namespace hdgqoi
