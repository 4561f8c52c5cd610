#pragma once

#include "hdgqoi/hdg.hpp"
#include "hdgqoi/mesh.hpp"
#include "hdgqoi/refine.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hdgqoi {

struct Problem {
  std::string id;
  std::string description;
  std::function<Mesh()> initial_mesh;
  ProblemData data;
  OutputFunctional output;
  std::optional<double> exact;                 // exact value of the output
  std::optional<ScalarField> exact_solution;   // primal solution, when known
  Refiner refiner = Refiner::Red;
  /// Uniform refinement as a mesh family indexed by level (level 0 is the
  /// initial mesh). Empty: refine every element with `refiner`.
  std::function<Mesh(int)> uniform_family;
};

/// example1_s1, example1_s2, example2_s1, example2_s2.
std::vector<std::string> builtin_ids();

/// Throws InputError listing the known ids.
Problem builtin(const std::string& id);

/// Problem from a JSON description:
///   { "mesh": "file" | "unit_square" | "lshape",
///     "nu": {"<region>": value, ...},
///     "f", "g_D", "g_N", "f_O", "g_D_O", "g_N_O": expressions (default "0"),
///     "exact": number, "refiner": "red" | "bisect" }
/// Mesh file paths are relative to the JSON file.
Problem load_problem(const std::string& path);

} // namespace hdgqoi
