// Command drivers behind the CLI subcommands. Each cmd_* wrapper turns the
// study result into artifacts under the configured output directory and an
// exit status:
//   0  success
//   2  configuration or problem-data rejection
//   3  solver non-convergence
//   4  a hard quality gate failed (converge, diagnose)
// The study functions underneath are reusable programmatically; they throw
// SolverFailure instead of returning status codes.

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "crvi/config.hpp"
#include "crvi/diagnostics.hpp"
#include "crvi/stepper.hpp"

namespace crvi {

class SolverFailure : public std::runtime_error {
public:
  SolverFailure(int level, int step, const std::string &what)
      : std::runtime_error(what), level_(level), step_(step) {}
  int level() const { return level_; }
  int step() const { return step_; }

private:
  int level_;
  int step_;
};

/// One refinement level of a study: the level-l mesh is the structured base
/// refined l times and the time grid halves its step per level.
struct LevelSetup {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<CrDiscretisation> gd;
  ProblemSpec problem;
  StepOptions options;
  int level = 0;
  int mesh_n = 0; // structured resolution of this level
};

/// Builds and validates one level. Throws std::invalid_argument on bad
/// presets, reaction-bound violations, infeasible initial data, or a time
/// step at or above the reaction stability restriction.
LevelSetup build_level(const RunConfig &cfg, int level);

struct RunOutcome {
  LevelSetup setup;
  EvolutionResult evolution;
  TrajectoryDiagnostics diagnostics;
};

/// One evolution on level 0. Non-convergence is reported in the outcome, not
/// thrown, so callers can still inspect the partial trajectory.
RunOutcome run_single(const RunConfig &cfg);

/// Errors of one level against the next-finer reference trajectory, measured
/// in the discrete norms of the energy accounting: value errors in
/// Linf-in-time of the spatial L2 norm over the coarse time levels, gradient
/// errors in L2-in-time over the coarse intervals (right-end values). Spatial
/// integrals run over the fine mesh, which is nested in the coarse one.
struct ErrorRow {
  int level = 0;
  int mesh_n = 0;
  double h = 0.0;
  int dofs = 0;
  int steps = 0;
  double err_a = 0.0;
  double err_grad_a = 0.0;
  double err_b = 0.0;
  double err_grad_b = 0.0;
  double max_residual_sign = 0.0;
  double max_residual_complementarity = 0.0;
};

struct ConvergeOutcome {
  std::vector<ErrorRow> rows; // levels 0 .. levels-1
  ErrorRow reference;         // info row for the reference level (errors 0)
  /// Energy accounting and per-step reports for levels 0..levels, the
  /// reference level last.
  std::vector<TrajectoryDiagnostics> level_diagnostics;
  std::vector<std::vector<StepReport>> step_reports;
  bool monotone = true; // the hard gate: all error columns decrease
  std::vector<std::string> gate_messages;

  /// log2(e[row]/e[row+1]) for the four error columns; entry row pairs
  /// (row, row+1). NaN when a column hits the zero floor.
  std::vector<std::array<double, 4>> orders() const;
};

/// Solves levels 0..levels-1 plus one reference level and compares. Progress
/// lines go to the stream. Throws SolverFailure when any level fails.
ConvergeOutcome converge_study(const RunConfig &cfg, std::ostream &progress);

struct DiagnoseMetric {
  std::string name;
  std::vector<double> values; // one per level
};

struct DiagnoseOutcome {
  std::vector<int> mesh_n; // per level
  std::vector<double> h;
  std::vector<DiagnoseMetric> metrics;
  bool pass = true;
  std::vector<std::string> gate_messages;

  const DiagnoseMetric &metric(const std::string &name) const;
};

/// Estimator battery across levels (no evolutions): the discrete Poincare
/// constant, the approximation estimators on affine and product-sine fields
/// (plus a barrier-constrained variant), and the integration-by-parts defect
/// on a small H_div battery. Gates: the Poincare column varies by < 20%,
/// affine values stay at roundoff, smooth-field columns decay by >= 1.5 per
/// level.
DiagnoseOutcome diagnose_study(const RunConfig &cfg);

struct OracleOutcome {
  int dof_count = 0;
  double discrepancy = 0.0;          // PSOR vs active-set on the final system
  double step_vs_enumeration = 0.0;  // full damped step vs active-set
  double residual_sign = 0.0;
  double residual_complementarity = 0.0;
};

/// One implicit step solved by both constrained solvers on a mesh with at
/// most 15 unknowns. Throws std::invalid_argument beyond that size.
OracleOutcome oracle_study(const RunConfig &cfg);

int cmd_run(const RunConfig &cfg, std::ostream &out, std::ostream &err);
int cmd_converge(const RunConfig &cfg, std::ostream &out, std::ostream &err);
int cmd_diagnose(const RunConfig &cfg, std::ostream &out, std::ostream &err);
int cmd_oracle(const RunConfig &cfg, std::ostream &out, std::ostream &err);

} // namespace crvi
