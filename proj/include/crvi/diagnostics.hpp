// Quantitative properties of a discretisation level and energy accounting of
// a computed trajectory.
//
// estimate_coercivity: square root of the largest eigenvalue of the pencil
//   M v = lambda K1 v (K1 = unit-tensor stiffness), the discrete Poincare
//   constant, by power iteration on K1^{-1} M.
// estimate_consistency: root of the minimized sum of squares
//   ||Pi phi - w||^2 + ||grad phi - grad w||^2 over the chosen edge space,
//   optionally under the barrier constraint (then a PSOR solve); the
//   sum-of-norms variant of the same quantity differs by at most sqrt(2).
//   The minimum is re-integrated from the residual field with the same
//   7-point rule that built the right-hand side, so exact reproduction comes
//   out at roundoff level instead of sqrt(eps).
// estimate_limit_conformity: dual norm sqrt(b' K1^{-1} b) of the integration-
//   by-parts defect b_sigma = integral(grad e_sigma . psi + e_sigma div psi).
// dual_norm: ||Pi u||_* = sqrt(b' K1^{-1} b) with b = M u.

#pragma once

#include <string>
#include <vector>

#include "crvi/assembly.hpp"
#include "crvi/stepper.hpp"

namespace crvi {

struct EstimatorResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

EstimatorResult estimate_coercivity(const CrDiscretisation &gd,
                                    double rel_tol = 1e-8,
                                    int max_iterations = 10000);

/// Rayleigh quotient ||Pi v|| / ||grad v|| of one vector; always at or below
/// the coercivity estimate.
double coercivity_quotient(const CrDiscretisation &gd, const DofVector &v);

double estimate_consistency(const CrDiscretisation &gd, const ScalarField &w,
                            const VectorField &grad_w, bool constrained,
                            DofClosure space = DofClosure::interior);

/// Objective value at a caller-supplied candidate (certificate: the estimate
/// never exceeds it). The candidate is indexed per the chosen space.
double consistency_objective(const CrDiscretisation &gd, const ScalarField &w,
                             const VectorField &grad_w,
                             const Eigen::VectorXd &candidate,
                             DofClosure space = DofClosure::interior);

double estimate_limit_conformity(const CrDiscretisation &gd,
                                 const VectorField &psi,
                                 const ScalarField &div_psi);

/// |defect(candidate)| / ||grad candidate||; never exceeds the estimate.
double limit_conformity_quotient(const CrDiscretisation &gd,
                                 const VectorField &psi,
                                 const ScalarField &div_psi,
                                 const DofVector &candidate);

/// Factors K1 once for repeated dual-norm evaluations.
class DualNormOperator {
public:
  explicit DualNormOperator(const CrDiscretisation &gd);
  double operator()(const Eigen::VectorXd &dofs) const;

private:
  Eigen::VectorXd mass_;
  SparseSymMatrix k1_;
  SpdFactor factor_;
};

double dual_norm(const CrDiscretisation &gd, const DofVector &u);

struct EnergyNorms {
  double delta_a_l2l2 = 0.0;   // time-L2 of the A time derivative
  double grad_a_linf_l2 = 0.0; // time-Linf of the A gradient norm
  double b_linf_l2 = 0.0;      // time-Linf of the B value norm
  double grad_b_l2l2 = 0.0;    // time-L2 of the B gradient norm
};

struct TrajectoryDiagnostics {
  EnergyNorms energy;
  double dual_b_integral = 0.0; // sum dt * dual_norm(delta B)^2
  double max_residual_sign = 0.0;
  double max_residual_complementarity = 0.0;
};

/// Time-Linf norms run over all levels; time-L2 sums use the level at the
/// right end of each interval.
TrajectoryDiagnostics energy_report(const CrDiscretisation &gd,
                                    const Trajectory &traj);

} // namespace crvi
