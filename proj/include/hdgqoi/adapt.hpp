#pragma once

#include "hdgqoi/bounds.hpp"
#include "hdgqoi/checks.hpp"
#include "hdgqoi/hdg.hpp"
#include "hdgqoi/refine.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hdgqoi {

struct MarkingStrategy {
  enum class Kind { Uniform, ErrorDistribution, Bulk };
  Kind kind = Kind::Uniform;
  double parameter = 0.0; // Delta_tol or Theta

  static MarkingStrategy uniform() { return {}; }
  static MarkingStrategy error_distribution(double tolerance);
  static MarkingStrategy bulk(double theta);

  /// "uniform", "tol:<Delta>" or "bulk:<Theta>".
  static MarkingStrategy parse(const std::string& text);
  std::string describe() const;
};

/// Elements to refine. Uniform marks everything; ErrorDistribution marks
/// gap_K >= Delta_tol / n_el; Bulk takes the smallest prefix of the elements
/// sorted by decreasing gap (ties by index) holding Theta of the total.
std::vector<int> mark(const std::vector<double>& gaps, const MarkingStrategy& strategy);

/// -2 log(e1 / e2) / log(n1 / n2). NaN when an input is not positive or
/// n1 == n2.
double convergence_order(double e1, double n1, double e2, double n2);

struct PipelineOptions {
  int degree = 1;
  double tau = 1.0;
  bool optimize = false;
  int quad_degree = -1;
  EtaMode mode = EtaMode::Projected;
  bool audit = true;
};

struct PipelineResult {
  BoundsResult bounds;
  ReconstructionAudit primal_audit;
  ReconstructionAudit adjoint_audit;
};

/// Primal and adjoint solves, both reconstructions, bounds and raw output on
/// one mesh.
PipelineResult run_pipeline(std::shared_ptr<const Mesh> mesh, const ProblemData& data,
                            const OutputFunctional& out, const PipelineOptions& options);

struct IterationRecord {
  int nel = 0;
  int n_edge_dofs = 0; // (p+1) per facet
  BoundsResult bounds;
  double audit = 0.0;  // worst reconstruction audit residual
  int marked = 0;
  double seconds = 0.0;
};

struct AdaptiveOptions {
  PipelineOptions pipeline;
  MarkingStrategy strategy;
  Refiner refiner = Refiner::Red;
  double target = 1e-8;    // on the full gap s_plus - s_minus
  int max_iterations = 40;
  /// Used instead of `refiner` for uniform marking when set.
  std::function<Mesh(int)> uniform_family;
  std::function<void(const IterationRecord&)> on_iteration;
};

struct AdaptiveRun {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  std::shared_ptr<const Mesh> final_mesh;
};

AdaptiveRun adaptive_loop(const Mesh& initial, const ProblemData& data,
                          const OutputFunctional& out, const AdaptiveOptions& options);

} // namespace hdgqoi
