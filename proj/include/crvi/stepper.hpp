// Implicit Euler time stepping for the coupled pair: per step, a
// barrier-constrained solve for the A field and a linear solve for the B
// field, wrapped in a damped Picard iteration that freezes the reactions at
// the previous iterate.
//
// Per iterate k, with H_A = M/dt + K_A and H_B = M/dt + K_B:
//   A: LCP  H_A a <= M/dt a_n + load_f(w^k)  under a <= chi (PSOR)
//   B: H_B b = M/dt b_n + load_g(w^k)        (direct factor)
// The iteration starts at w^0 = (a_n, b_n); damping theta blends old and new
// iterates and is halved when the iterate change grows twice in a row.
//
// Hard precondition: dt < 1/(2M) with M the declared reaction Lipschitz
// constant (no restriction when M = 0).

#pragma once

#include <memory>
#include <vector>

#include "crvi/assembly.hpp"
#include "crvi/discretisation.hpp"
#include "crvi/lcp.hpp"

namespace crvi {

/// Continuous problem data. The declared reaction bounds are validated by
/// sampling; initial data for the constrained field must sit at or below the
/// barrier at edge midpoints.
struct ProblemSpec {
  std::shared_ptr<const Mesh> mesh;
  double horizon = 1.0;
  TensorField diff_a;
  TensorField diff_b;
  ReactionPair reactions;
  ScalarField obstacle;
  ScalarField a_ini;
  ScalarField b_ini;

  /// Samples pair_count random argument pairs in [-box, box]^2 and rejects a
  /// declared Lipschitz constant below the sampled slope (factor 1.01), a
  /// declared origin bound below the actual one, and initial data above the
  /// barrier at any edge midpoint.
  void validate(unsigned seed, double box, int pair_count = 1000) const;
};

struct StepOptions {
  PsorOptions psor{};
  double picard_tol = 1e-11;
  int picard_max = 50;
  double damping = 1.0;
};

struct StepReport {
  int picard_iterations = 0;
  bool converged = false;
  int psor_sweeps = 0;
  double final_change = 0.0;
  double residual_sign = 0.0;            // max positive part of r
  double residual_complementarity = 0.0; // max |r (a - chi)| / (1 + |chi|)
  double damping_final = 1.0;
  bool change_monotone = true; // iterate changes decreased after iterate 1
  std::vector<double> change_history;
};

struct StepResult {
  DofVector a;
  DofVector b;
  StepReport report;
};

/// Assembled operators shared by all steps of one evolution. Per-dt systems
/// (A-side matrix, factored B-side matrix) are cached; dts within relative
/// 1e-12 of a cached one reuse it, and the cached value is what the step
/// actually applies.
class SchemeOperators {
public:
  SchemeOperators(const CrDiscretisation &gd, const ProblemSpec &spec);

  const Eigen::VectorXd &mass() const { return mass_; }
  const SparseSymMatrix &stiffness_a() const { return stiff_a_; }
  const SparseSymMatrix &stiffness_b() const { return stiff_b_; }

  struct DtSystems {
    double dt = 0.0;
    SparseSymMatrix h_a;
    std::unique_ptr<SpdFactor> h_b;
  };
  const DtSystems &systems_for(double dt);

private:
  Eigen::VectorXd mass_;
  SparseSymMatrix stiff_a_;
  SparseSymMatrix stiff_b_;
  std::vector<std::unique_ptr<DtSystems>> cache_;
};

/// One implicit Euler step from (a_prev, b_prev). a_prev must be feasible.
StepResult advance_step(const CrDiscretisation &gd, const ProblemSpec &spec,
                        SchemeOperators &ops, const DofVector &a_prev,
                        const DofVector &b_prev, double dt,
                        const StepOptions &opts);

/// Convenience overload assembling operators on the fly.
StepResult advance_step(const CrDiscretisation &gd, const ProblemSpec &spec,
                        const DofVector &a_prev, const DofVector &b_prev,
                        double dt, const StepOptions &opts);

struct Trajectory {
  std::vector<DofVector> a; // steps + 1 levels, level 0 is the interpolant
  std::vector<DofVector> b;
  std::vector<StepReport> steps;
};

struct EvolutionResult {
  Trajectory trajectory;
  bool converged = false;
  int failed_step = -1; // index of the step that failed, -1 when none
};

/// Runs the full time grid of gd. On a step failure the partial trajectory
/// (including the failing iterate) is returned with converged = false.
EvolutionResult solve_evolution(const CrDiscretisation &gd,
                                const ProblemSpec &spec,
                                const StepOptions &opts);

/// True when every constrained level satisfies a <= chi entrywise (exact).
bool trajectory_feasible(const CrDiscretisation &gd, const Trajectory &traj);

} // namespace crvi
