// Batch driver: one uniform or adaptive study per invocation.
//
// Exit status: 0 success, 2 configuration error, 3 solver or evaluation
// failure, 4 iteration cap reached before the target gap, 5 the exact output
// fell outside the computed bounds.

#include "hdgqoi/adapt.hpp"
#include "hdgqoi/errors.hpp"
#include "hdgqoi/mesh_io.hpp"
#include "hdgqoi/problems.hpp"
#include "hdgqoi/reconstruct.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

using namespace hdgqoi;

namespace {

enum Exit { Ok = 0, ConfigError = 2, SolverFailure = 3, NotConverged = 4, Violation = 5 };

struct RunConfig {
  std::string problem = "example1_s1";
  int p = 1;
  double tau = 1.0;
  std::string strategy = "uniform";
  std::string refiner; // empty: the problem's default
  double target = 1e-8;
  int max_iter = 40;
  bool optimize = false;
  int quad_degree = -1;
  std::string eta_mode = "projected";
  std::string out = "run";
  bool gnuplot = false;
  bool dump_fields = false;
};

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

void write_report(std::ostream& os, const Problem& problem, const RunConfig& cfg,
                  const AdaptiveRun& run) {
  os << "problem " << problem.id << ": " << problem.description << "\n";
  os << "p = " << cfg.p << ", tau = " << cfg.tau << ", strategy " << cfg.strategy
     << ", target " << cfg.target << (cfg.optimize ? ", local optimization" : "") << "\n";
  if (problem.exact)
    os << "exact s = " << format("%.16g", *problem.exact) << "\n";
  os << "\n";
  char line[512];
  std::snprintf(line, sizeof line, "%8s %8s %14s %14s %16s %10s %6s %10s %10s\n", "nel", "n_edge",
                "s_minus", "s_plus", "s_tilde", "half_gap", "order", "|s-s_h|", "|s-s~|");
  os << line;
  for (std::size_t i = 0; i < run.iterations.size(); ++i) {
    const auto& r = run.iterations[i];
    std::string order = "-";
    if (i > 0) {
      const auto& q = run.iterations[i - 1];
      const double o = convergence_order(q.bounds.half_gap, q.nel, r.bounds.half_gap, r.nel);
      if (std::isfinite(o))
        order = format("%.2f", o);
    }
    std::string err_h = "-", err_t = "-";
    if (problem.exact) {
      err_h = format("%.2e", std::abs(*problem.exact - r.bounds.s_h));
      err_t = format("%.2e", std::abs(*problem.exact - r.bounds.s_tilde));
    }
    std::snprintf(line, sizeof line, "%8d %8d %14.10f %14.10f %16.12f %10.2e %6s %10s %10s\n",
                  r.nel, r.n_edge_dofs, r.bounds.s_minus, r.bounds.s_plus, r.bounds.s_tilde,
                  r.bounds.half_gap, order.c_str(), err_h.c_str(), err_t.c_str());
    os << line;
  }
  os << "\n" << (run.converged ? "converged" : "not converged") << " after "
     << run.iterations.size() << " iterations\n";
}

void dump_fields(const std::string& path, const Mesh& mesh_in, const Problem& problem,
                 const RunConfig& cfg) {
  auto mesh = std::make_shared<const Mesh>(mesh_in);
  HdgOptions hdg;
  hdg.degree = cfg.p;
  hdg.tau = cfg.tau;
  hdg.quad_degree = cfg.quad_degree;
  const auto primal = solve_primal(mesh, problem.data, hdg);
  const auto adjoint = solve_adjoint(mesh, problem.output, hdg);
  const auto rp = reconstruct(primal, problem.data.dirichlet, cfg.optimize);
  const auto ra = reconstruct(adjoint, problem.output.dirichlet, cfg.optimize);
  std::ofstream os(path);
  os << "element,x,y,u,qx,qy,xi,zx,zy\n";
  os.precision(12);
  for (int k = 0; k < mesh->num_elements(); ++k) {
    const ElementValues ev = element_values(*mesh, k, cfg.p + 1, 2 * cfg.p + 2);
    const auto u = rp.potential.values(ev, k);
    const auto q = rp.flux.values(ev, k);
    const auto xi = ra.potential.values(ev, k);
    const auto z = ra.flux.values(ev, k);
    for (std::size_t i = 0; i < ev.points.size(); ++i)
      os << k << ',' << ev.points[i].x() << ',' << ev.points[i].y() << ',' << u[i] << ','
         << q(i, 0) << ',' << q(i, 1) << ',' << xi[i] << ',' << z(i, 0) << ',' << z(i, 1)
         << '\n';
  }
}

int run(const RunConfig& cfg) {
  // Everything that can be rejected is checked before touching the disk.
  Problem problem;
  AdaptiveOptions opt;
  try {
    problem = cfg.problem.ends_with(".json") ? load_problem(cfg.problem) : builtin(cfg.problem);
    if (cfg.p < 0)
      throw InputError("p must be non-negative");
    if (!(cfg.tau > 0))
      throw InputError("tau must be positive");
    opt.pipeline.degree = cfg.p;
    opt.pipeline.tau = cfg.tau;
    opt.pipeline.optimize = cfg.optimize;
    opt.pipeline.quad_degree = cfg.quad_degree;
    if (cfg.eta_mode == "projected")
      opt.pipeline.mode = EtaMode::Projected;
    else if (cfg.eta_mode == "zero-order")
      opt.pipeline.mode = EtaMode::ZeroOrder;
    else
      throw InputError("unknown eta mode '" + cfg.eta_mode + "'");
    opt.strategy = MarkingStrategy::parse(cfg.strategy);
    opt.refiner = cfg.refiner.empty() ? problem.refiner : parse_refiner(cfg.refiner);
    if (!(cfg.target > 0))
      throw InputError("target must be positive");
    if (cfg.max_iter < 1)
      throw InputError("max-iter must be at least 1");
    opt.target = cfg.target;
    opt.max_iterations = cfg.max_iter;
    if (opt.refiner == problem.refiner)
      opt.uniform_family = problem.uniform_family;
  } catch (const InputError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return ConfigError;
  }

  const std::filesystem::path dir(cfg.out);
  AdaptiveRun result;
  try {
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / "convergence.csv");
    const double exact = problem.exact ? *problem.exact : std::numeric_limits<double>::quiet_NaN();
    csv << csv_header(problem.exact.has_value()) << ",marked,strategy\n";
    opt.on_iteration = [&](const IterationRecord& r) {
      csv << csv_row(r.bounds, r.nel, r.n_edge_dofs, exact) << ',' << r.marked << ','
          << cfg.strategy << '\n';
      csv.flush();
      std::fprintf(stderr, "nel %7d  [%.10f, %.10f]  half gap %.3e  (%.2fs)\n", r.nel,
                   r.bounds.s_minus, r.bounds.s_plus, r.bounds.half_gap, r.seconds);
    };
    result = adaptive_loop(problem.initial_mesh(), problem.data, problem.output, opt);
  } catch (const InputError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return ConfigError;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return SolverFailure;
  }

  std::ofstream report(dir / "report.txt");
  write_report(report, problem, cfg, result);
  write_mesh((dir / "final_mesh.txt").string(), *result.final_mesh);

  int violations = 0;
  double worst_audit = 0.0;
  for (const auto& r : result.iterations) {
    worst_audit = std::max(worst_audit, r.audit);
    if (problem.exact && !(r.bounds.s_minus <= *problem.exact && *problem.exact <= r.bounds.s_plus))
      ++violations;
  }

  if (cfg.gnuplot) {
    std::ofstream gp(dir / "convergence.dat");
    gp << "# nel half_gap s_minus s_plus s_tilde\n";
    gp.precision(15);
    for (const auto& r : result.iterations)
      gp << r.nel << ' ' << r.bounds.half_gap << ' ' << r.bounds.s_minus << ' '
         << r.bounds.s_plus << ' ' << r.bounds.s_tilde << '\n';
  }
  if (cfg.dump_fields) {
    try {
      dump_fields((dir / "fields.csv").string(), *result.final_mesh, problem, cfg);
    } catch (const std::exception& e) {
      std::cerr << "failure: " << e.what() << "\n";
      return SolverFailure;
    }
  }

  const auto& last = result.iterations.back();
  nlohmann::json summary = {
      {"problem", problem.id},
      {"p", cfg.p},
      {"tau", cfg.tau},
      {"strategy", cfg.strategy},
      {"refiner", refiner_name(opt.refiner)},
      {"optimize", cfg.optimize},
      {"target", cfg.target},
      {"iterations", result.iterations.size()},
      {"converged", result.converged},
      {"nel", last.nel},
      {"s_minus", last.bounds.s_minus},
      {"s_plus", last.bounds.s_plus},
      {"s_tilde", last.bounds.s_tilde},
      {"half_gap", last.bounds.half_gap},
      {"kappa", last.bounds.kappa},
      {"s_h", last.bounds.s_h},
      {"worst_audit", worst_audit},
  };
  if (problem.exact) {
    summary["exact"] = *problem.exact;
    summary["containment"] = violations == 0 ? "pass" : "fail";
    summary["violations"] = violations;
  }
  std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";

  if (violations > 0) {
    std::cerr << "containment violated on " << violations << " iteration(s)\n";
    return Violation;
  }
  return result.converged ? Ok : NotConverged;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guaranteed bounds for linear outputs of HDG approximations of Poisson problems"};
  RunConfig cfg;
  app.set_config("--config", "", "TOML configuration file; flags override it");
  app.add_option("--problem", cfg.problem,
                 "example1_s1 | example1_s2 | example2_s1 | example2_s2 | <file>.json");
  app.add_option("--p", cfg.p, "polynomial degree");
  app.add_option("--tau", cfg.tau, "stabilization parameter");
  app.add_option("--strategy", cfg.strategy, "uniform | tol:<gap> | bulk:<theta>");
  app.add_option("--refiner", cfg.refiner, "red | bisect (default: per problem)");
  app.add_option("--target", cfg.target, "stop when s_plus - s_minus is below this");
  app.add_option("--max-iter", cfg.max_iter, "iteration cap");
  app.add_flag("--optimize", cfg.optimize, "element-wise optimization of the reconstructions");
  app.add_option("--quad-degree", cfg.quad_degree, "quadrature degree for data integrals");
  app.add_option("--eta-mode", cfg.eta_mode, "projected | zero-order");
  app.add_option("--out", cfg.out, "output directory");
  app.add_flag("--gnuplot", cfg.gnuplot, "also write convergence.dat");
  app.add_flag("--dump-fields", cfg.dump_fields, "write reconstructed fields on the final mesh");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Ok : ConfigError;
  }
  return run(cfg);
}
