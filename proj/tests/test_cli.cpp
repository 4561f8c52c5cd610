#include "support.hpp"

#include "hdgqoi/adapt.hpp"
#include "hdgqoi/errors.hpp"
#include "hdgqoi/expression.hpp"
#include "hdgqoi/mesh_io.hpp"
#include "hdgqoi/problems.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hdgqoi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hdgqoi_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HDGQOI_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("expression values") {
  const Point a(0.3, -0.7);
  CHECK(Expression::parse("1 + 2*3")(a) == 7.0);
  CHECK(Expression::parse("2^3^2")(a) == 512.0);
  CHECK(Expression::parse("-x^2")(Point(3, 0)) == -9.0);
  CHECK(Expression::parse("(1 - 2) - 3")(a) == -4.0);
  CHECK(Expression::parse("8 / 4 / 2")(a) == 1.0);
  CHECK(Expression::parse("1.5e-3 * 2")(a) == testing::rel(3e-3));
  CHECK(Expression::parse("sin(pi*x)*y")(a) == testing::rel(std::sin(M_PI * 0.3) * -0.7));
  CHECK(Expression::parse("sqrt(abs(y)) + exp(log(2))")(a) == testing::rel(std::sqrt(0.7) + 2));
  CHECK(Expression::parse("0").field().is_zero());
  CHECK_FALSE(Expression::parse("x").field().is_zero());
}

TEST_CASE("expression gradients match finite differences") {
  testing::Gen g(41);
  const char* texts[] = {"sin(pi*x)*cos(2*y)", "x^3*y - y^2/(1 + x^2)", "exp(x*y)*tanh(x - y)",
                         "-3*(2*y-1)/(1e-4 + ((-2*x+0.5)^2 + (2*y-1)^2)^2.5)",
                         "sqrt(1 + x^2 + y^2) + cosh(y) - sinh(x) + tan(0.3*x)"};
  for (const char* t : texts) {
    const Expression e = Expression::parse(t);
    for (int i = 0; i < 20; ++i) {
      const Point x(g.uniform(0.05, 0.95), g.uniform(0.05, 0.95));
      const double h = 1e-6;
      const Vec2 fd((e(x + Vec2(h, 0)) - e(x - Vec2(h, 0))) / (2 * h),
                    (e(x + Vec2(0, h)) - e(x - Vec2(0, h))) / (2 * h));
      const Vec2 gr = e.grad(x);
      CAPTURE(t);
      CHECK((gr - fd).norm() <= 1e-5 * (1 + gr.norm()));
      CHECK(e.field().grad(x).isApprox(gr));
    }
  }
}

TEST_CASE("malformed expressions are rejected") {
  for (const char* bad : {"", "1 +", "sin(", "foo(x)", "x y", "1)", "(x", "z", "2**3", "sin x", "."})
    CHECK_THROWS_AS(Expression::parse(bad), InputError);
  try {
    Expression::parse("x + * y");
    FAIL("no exception");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find('4') != std::string::npos);
  }
}

TEST_CASE("built-in problems") {
  CHECK(builtin_ids().size() == 4);
  CHECK(*builtin("example1_s1").exact == testing::rel(4 / (M_PI * M_PI), 1e-14));
  CHECK(*builtin("example1_s2").exact == testing::rel(M_PI * M_PI / 4, 1e-14));
  CHECK(*builtin("example2_s1").exact == testing::rel(0.2140758036140825, 1e-14));
  CHECK(builtin("example1_s1").initial_mesh().num_elements() == 16);
  CHECK(builtin("example2_s2").initial_mesh().num_elements() == 6);
  CHECK(builtin("example2_s1").refiner == Refiner::Bisection);
  CHECK_THROWS_AS(builtin("example3"), InputError);
  // the first output picks the solution itself: exact solution integrates to the exact output
  const Problem p = builtin("example1_s1");
  CHECK((*p.exact_solution)(Point(0.5, 0.5)) == testing::rel(1.0));
}

TEST_CASE("problems from JSON files") {
  const fs::path dir = scratch("json");
  fs::create_directories(dir);
  write_mesh((dir / "square.mesh").string(), unit_square_crisscross(0));
  std::ofstream(dir / "p.json") << R"js({
    "mesh": "square.mesh",
    "f": "2*pi^2*sin(pi*x)*sin(pi*y)",
    "f_O": "1",
    "exact": 0.40528473456935108,
    "refiner": "red",
    "description": "sine bump"
  })js";
  const Problem loaded = load_problem((dir / "p.json").string());
  const Problem ref = builtin("example1_s1");
  CHECK(*loaded.exact == testing::rel(*ref.exact, 1e-15));
  PipelineOptions o;
  o.degree = 2;
  const auto a = run_pipeline(std::make_shared<const Mesh>(loaded.initial_mesh()), loaded.data, loaded.output, o);
  const auto b = run_pipeline(std::make_shared<const Mesh>(ref.initial_mesh()), ref.data, ref.output, o);
  CHECK(a.bounds.s_minus == testing::rel(b.bounds.s_minus, 1e-12));
  CHECK(a.bounds.s_plus == testing::rel(b.bounds.s_plus, 1e-12));

  std::ofstream(dir / "bad1.json") << R"js({"mesh": "lshape", "f": "1 +"})js";
  std::ofstream(dir / "bad2.json") << R"({"mesh": "missing.mesh"})";
  std::ofstream(dir / "bad3.json") << R"({"mesh": "lshape", "refiner": "blue"})";
  std::ofstream(dir / "bad4.json") << "{ not json";
  for (const char* f : {"bad1.json", "bad2.json", "bad3.json", "bad4.json", "absent.json"})
    CHECK_THROWS_AS(load_problem((dir / f).string()), InputError);
  fs::remove_all(dir);
}

TEST_CASE("command line runs") {
  SUBCASE("invalid input exits with 2 and writes nothing") {
    const fs::path out = scratch("invalid");
    CHECK(run_cli("--problem nowhere --out " + out.string()) == 2);
    CHECK(run_cli("--problem example1_s1 --p -1 --out " + out.string()) == 2);
    CHECK(run_cli("--problem example1_s1 --strategy bulk:7 --out " + out.string()) == 2);
    CHECK(run_cli("--problem example1_s1 --tau 0 --out " + out.string()) == 2);
    CHECK(run_cli("--problem example1_s1 --no-such-flag --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));
  }
  SUBCASE("a converged run writes its report") {
    const fs::path out = scratch("ok");
    CHECK(run_cli("--problem example1_s1 --p 2 --strategy uniform --target 1e-6 --gnuplot --out " +
                  out.string()) == 0);
    for (const char* f : {"convergence.csv", "report.txt", "final_mesh.txt", "summary.json", "convergence.dat"})
      CHECK(fs::exists(out / f));
    const std::string report = slurp(out / "report.txt");
    CHECK(report.find("order") != std::string::npos);
    const std::string csv = slurp(out / "convergence.csv");
    CHECK(csv.rfind("nel,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    const Mesh m = read_mesh((out / "final_mesh.txt").string());
    CHECK(m.num_elements() == 256);

    const fs::path again = scratch("ok2");
    CHECK(run_cli("--problem example1_s1 --p 2 --strategy uniform --target 1e-6 --out " + again.string()) == 0);
    CHECK(slurp(again / "convergence.csv") == csv);
  }
  SUBCASE("the iteration cap exits with 4") {
    const fs::path out = scratch("cap");
    CHECK(run_cli("--problem example2_s1 --strategy bulk:0.5 --max-iter 2 --out " + out.string()) == 4);
    CHECK(fs::exists(out / "summary.json"));
  }
  SUBCASE("TOML configuration with overriding flags") {
    const fs::path out = scratch("toml");
    const fs::path cfg = out.parent_path() / "run.toml";
    std::ofstream(cfg) << "problem = \"example1_s1\"\np = 3\nstrategy = \"uniform\"\ntarget = 1e-3\n";
    CHECK(run_cli("--config " + cfg.string() + " --p 1 --out " + out.string()) == 0);
    const std::string csv = slurp(out / "convergence.csv");
    // p = 1 needs 64 elements for a gap below 1e-3, p = 3 would stop at 16
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  }
  fs::remove_all(scratch("").parent_path());
}
