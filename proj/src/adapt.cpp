#include "hdgqoi/adapt.hpp"

#include "hdgqoi/errors.hpp"
#include "hdgqoi/reconstruct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hdgqoi {

MarkingStrategy MarkingStrategy::error_distribution(double tolerance) {
  if (!(tolerance > 0))
    throw InputError("error distribution tolerance must be positive");
  return {Kind::ErrorDistribution, tolerance};
}

MarkingStrategy MarkingStrategy::bulk(double theta) {
  if (!(theta > 0 && theta <= 1))
    throw InputError("bulk parameter must lie in (0, 1]");
  return {Kind::Bulk, theta};
}

MarkingStrategy MarkingStrategy::parse(const std::string& text) {
  if (text == "uniform")
    return uniform();
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1)
        throw InputError("");
    } catch (const std::exception&) {
      throw InputError("bad strategy parameter in '" + text + "'");
    }
    if (head == "tol")
      return error_distribution(value);
    if (head == "bulk")
      return bulk(value);
  }
  throw InputError("unknown strategy '" + text + "' (expected uniform, tol:<D> or bulk:<T>)");
}

std::string MarkingStrategy::describe() const {
  std::ostringstream s;
  switch (kind) {
  case Kind::Uniform: s << "uniform"; break;
  case Kind::ErrorDistribution: s << "tol:" << parameter; break;
  case Kind::Bulk: s << "bulk:" << parameter; break;
  }
  return s.str();
}

std::vector<int> mark(const std::vector<double>& gaps, const MarkingStrategy& strategy) {
  const int n = static_cast<int>(gaps.size());
  for (double g : gaps)
    if (!(g >= 0))
      throw InputError("element gap contributions must be non-negative");
  std::vector<int> marked;
  switch (strategy.kind) {
  case MarkingStrategy::Kind::Uniform:
    marked.resize(n);
    std::iota(marked.begin(), marked.end(), 0);
    break;
  case MarkingStrategy::Kind::ErrorDistribution: {
    const double threshold = strategy.parameter / n;
    for (int k = 0; k < n; ++k)
      if (gaps[k] > 0 && gaps[k] >= threshold * (1 - 1e-14))
        marked.push_back(k);
    break;
  }
  case MarkingStrategy::Kind::Bulk: {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return gaps[a] > gaps[b]; });
    const double total = std::accumulate(gaps.begin(), gaps.end(), 0.0);
    if (total <= 0)
      break;
    // Compare against the goal with a relative slack so Theta = 1 takes
    // every element with a nonzero gap despite summation order.
    const double goal = strategy.parameter * total * (1 - 1e-14);
    double sum = 0.0;
    for (int k : order) {
      if (sum >= goal || gaps[k] == 0)
        break;
      sum += gaps[k];
      marked.push_back(k);
    }
    std::sort(marked.begin(), marked.end());
    break;
  }
  }
  return marked;
}

double convergence_order(double e1, double n1, double e2, double n2) {
  if (!(e1 > 0 && e2 > 0 && n1 > 0 && n2 > 0) || n1 == n2)
    return std::numeric_limits<double>::quiet_NaN();
  return -2.0 * std::log(e1 / e2) / std::log(n1 / n2);
}

PipelineResult run_pipeline(std::shared_ptr<const Mesh> mesh, const ProblemData& data,
                            const OutputFunctional& out, const PipelineOptions& options) {
  HdgOptions hdg;
  hdg.degree = options.degree;
  hdg.tau = options.tau;
  hdg.quad_degree = options.quad_degree;
  const HDGSolution primal = solve_primal(mesh, data, hdg);
  const HDGSolution adjoint = solve_adjoint(mesh, out, hdg);
  const ProblemData adj = adjoint_data(out);
  const Reconstruction rp = reconstruct(primal, data.dirichlet, options.optimize);
  const Reconstruction ra = reconstruct(adjoint, adj.dirichlet, options.optimize);

  PipelineResult result;
  BoundsOptions bo;
  bo.quad_degree = options.quad_degree;
  bo.mode = options.mode;
  result.bounds = compute_bounds(rp, ra, data, out, bo);
  result.bounds.s_h = raw_output(primal, out, options.quad_degree);
  if (options.audit) {
    result.primal_audit = audit(rp, data.source, data.neumann, data.dirichlet);
    result.adjoint_audit = audit(ra, adj.source, adj.neumann, adj.dirichlet);
  }
  return result;
}

AdaptiveRun adaptive_loop(const Mesh& initial, const ProblemData& data,
                          const OutputFunctional& out, const AdaptiveOptions& options) {
  if (!(options.target > 0))
    throw InputError("target gap must be positive");
  if (options.max_iterations < 1)
    throw InputError("iteration cap must be at least 1");

  AdaptiveRun run;
  auto mesh = std::make_shared<const Mesh>(initial);
  int level = 0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const auto start = std::chrono::steady_clock::now();
    const PipelineResult r = run_pipeline(mesh, data, out, options.pipeline);

    IterationRecord rec;
    rec.nel = mesh->num_elements();
    rec.n_edge_dofs = (options.pipeline.degree + 1) * mesh->num_facets();
    rec.bounds = r.bounds;
    rec.audit = std::max(r.primal_audit.worst(), r.adjoint_audit.worst());

    const bool done = r.bounds.s_plus - r.bounds.s_minus < options.target;
    std::vector<int> marks;
    if (!done)
      marks = mark(r.bounds.gap, options.strategy);
    rec.marked = static_cast<int>(marks.size());
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.iterations.push_back(rec);
    if (options.on_iteration)
      options.on_iteration(rec);

    run.final_mesh = mesh;
    if (done) {
      run.converged = true;
      break;
    }
    if (marks.empty())
      break;
    if (options.strategy.kind == MarkingStrategy::Kind::Uniform && options.uniform_family)
      mesh = std::make_shared<const Mesh>(options.uniform_family(++level));
    else
      mesh = std::make_shared<const Mesh>(refine(*mesh, marks, options.refiner));
  }
  return run;
}

} // namespace hdgqoi
