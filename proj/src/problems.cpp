#include "hdgqoi/problems.hpp"

#include "hdgqoi/builtin_meshes.hpp"
#include "hdgqoi/errors.hpp"
#include "hdgqoi/expression.hpp"
#include "hdgqoi/mesh_io.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace hdgqoi {

namespace {

constexpr double pi = std::numbers::pi;

ScalarField smooth_solution() {
  return ScalarField([](const Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); },
                     [](const Point& x) {
                       return Vec2(pi * std::cos(pi * x.x()) * std::sin(pi * x.y()),
                                   pi * std::sin(pi * x.x()) * std::cos(pi * x.y()));
                     });
}

Problem example1() {
  Problem p;
  p.initial_mesh = [] { return unit_square_crisscross(0); };
  p.uniform_family = [](int level) { return unit_square_crisscross(level); };
  p.refiner = Refiner::Red;
  p.data.source = smooth_solution().scaled(2 * pi * pi);
  p.exact_solution = smooth_solution();
  return p;
}

Problem example2() {
  Problem p;
  p.initial_mesh = [] { return lshape_initial(); };
  p.refiner = Refiner::Bisection;
  p.data.source = ScalarField::constant(1.0);
  return p;
}

} // namespace

std::vector<std::string> builtin_ids() {
  return {"example1_s1", "example1_s2", "example2_s1", "example2_s2"};
}

Problem builtin(const std::string& id) {
  if (id == "example1_s1") {
    Problem p = example1();
    p.id = id;
    p.description = "unit square, u = sin(pi x) sin(pi y), output: integral of u";
    p.output.source = ScalarField::constant(1.0);
    p.exact = 4.0 / (pi * pi);
    return p;
  }
  if (id == "example1_s2") {
    Problem p = example1();
    p.id = id;
    p.description = "unit square, u = sin(pi x) sin(pi y), output: weighted normal flux on x = 1";
    p.output.dirichlet = ScalarField(
        [](const Point& x) { return x.x() > 1 - 1e-12 ? 0.5 * pi * std::sin(pi * x.y()) : 0.0; },
        [](const Point& x) {
          return x.x() > 1 - 1e-12 ? Vec2(0.0, 0.5 * pi * pi * std::cos(pi * x.y()))
                                   : Vec2(0.0, 0.0);
        });
    p.exact = pi * pi / 4.0;
    return p;
  }
  if (id == "example2_s1") {
    Problem p = example2();
    p.id = id;
    p.description = "L-shaped domain, f = 1, output: energy norm squared";
    p.output.source = ScalarField::constant(1.0);
    p.exact = 0.2140758036140825;
    return p;
  }
  if (id == "example2_s2") {
    Problem p = example2();
    p.id = id;
    p.description = "L-shaped domain, f = 1, output: weighted by a steep source near (0.25, 0.5)";
    p.output.source = Expression::parse(
        "-3*(2*y-1)/(1e-4 + ((-2*x+0.5)^2 + (2*y-1)^2)^2.5)").field();
    return p;
  }
  std::string known;
  for (const auto& k : builtin_ids())
    known += (known.empty() ? "" : ", ") + k;
  throw InputError("unknown problem '" + id + "' (known: " + known + ")");
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open problem file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("problem file " + path + ": " + e.what());
  }
  if (!j.is_object())
    throw InputError("problem file " + path + ": expected a JSON object");

  Problem p;
  p.id = std::filesystem::path(path).stem().string();
  p.description = j.value("description", std::string("external problem"));

  std::map<int, double> nu;
  if (j.contains("nu")) {
    for (const auto& [region, value] : j["nu"].items()) {
      if (!value.is_number() || value.get<double>() <= 0)
        throw InputError("problem file " + path + ": nu must be positive numbers");
      nu[std::stoi(region)] = value.get<double>();
    }
  }
  const double nu0 = nu.count(0) ? nu[0] : 1.0;
  const std::string mesh = j.value("mesh", std::string("unit_square"));
  if (mesh == "unit_square") {
    p.initial_mesh = [nu0] { return unit_square_crisscross(0, nu0); };
    p.uniform_family = [nu0](int level) { return unit_square_crisscross(level, nu0); };
  } else if (mesh == "lshape") {
    p.initial_mesh = [nu0] { return lshape_initial(nu0); };
  } else {
    const auto file = std::filesystem::path(path).parent_path() / mesh;
    Mesh m = read_mesh(file.string(), nu);
    p.initial_mesh = [m] { return m; };
  }

  auto expr = [&](const char* key) {
    if (!j.contains(key))
      return ScalarField::zero();
    if (!j[key].is_string())
      throw InputError(std::string("problem file ") + path + ": '" + key +
                       "' must be an expression string");
    return Expression::parse(j[key].get<std::string>()).field();
  };
  p.data = {expr("f"), expr("g_D"), expr("g_N")};
  p.output = {expr("f_O"), expr("g_D_O"), expr("g_N_O")};
  if (j.contains("exact")) {
    if (!j["exact"].is_number())
      throw InputError("problem file " + path + ": 'exact' must be a number");
    p.exact = j["exact"].get<double>();
  }
  if (j.contains("solution"))
    p.exact_solution = expr("solution");
  p.refiner = parse_refiner(j.value("refiner", std::string(mesh == "lshape" ? "bisect" : "red")));
  return p;
}

} // namespace hdgqoi
