// Solvers for the per-step box-constrained problems.
//
// The constrained problem is the upper-bounded LCP: minimize
// 1/2 x'Hx - q'x over {x <= upper} with H symmetric positive definite.
// Its KKT system, with r = Hx - q:
//     x <= upper,   r <= 0,   r_i (x_i - upper_i) = 0.
// solve_psor runs projected SOR sweeps; solve_active_set enumerates active
// sets (exact reference for small dimensions); solve_spd is the plain
// conjugate-gradient path for the unconstrained linear steps.
//
// Residual conventions, also used by the stepper's per-step checks:
//   residual_sign            max_i max(r_i, 0)
//   residual_complementarity max_i |r_i (x_i - upper_i)| / (1 + |upper_i|)
// The complementarity scaling keeps the metric meaningful for very large
// bounds; for upper_i = +inf the scale factor is taken as 1, so such rows
// require |r_i| <= tol like any unconstrained equation.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "crvi/assembly.hpp"

namespace crvi {

struct LcpProblem {
  const SparseSymMatrix *h = nullptr;
  Eigen::VectorXd q;
  Eigen::VectorXd upper;
};

struct PsorOptions {
  double omega = 1.5;        // relaxation factor in (0, 2)
  double tol = 1e-12;        // KKT residual target
  int max_sweeps = 200000;
  bool record_energy = false; // fill LcpSolution::energy_history per sweep
};

struct LcpSolution {
  Eigen::VectorXd x;
  int sweeps = 0;
  bool converged = false;
  double residual_sign = 0.0;
  double residual_complementarity = 0.0;
  std::vector<double> energy_history;
};

/// Projected SOR from x0 (projected onto the feasible box first). Sweeps
/// until the per-sweep energy decrease falls below an adaptive threshold
/// starting at tol^2, then verifies the KKT residuals; tightens and continues
/// while they exceed tol, up to max_sweeps. Throws on a (near-)zero diagonal.
LcpSolution solve_psor(const LcpProblem &p, const Eigen::VectorXd &x0,
                       const PsorOptions &opts = {});

/// Exhaustive active-set reference: dimension must be <= 15. Returns the
/// unique KKT point; throws if no enumerated candidate passes the KKT test.
Eigen::VectorXd solve_active_set(const LcpProblem &p);

struct SpdSolveResult {
  Eigen::VectorXd x;
  bool converged = false;
  double rel_residual = 0.0;
  int iterations = 0;
};

/// Diagonally preconditioned conjugate gradients; converged means
/// ||Hx - rhs|| <= tol * ||rhs||.
SpdSolveResult solve_spd(const SparseSymMatrix &h, const Eigen::VectorXd &rhs,
                         double tol = 1e-12, int max_iterations = 0);

/// Sparse LDLT factorization for repeated solves with one matrix. Throws if
/// the factorization fails (the operator is expected positive definite).
class SpdFactor {
public:
  explicit SpdFactor(const SparseSymMatrix &h);
  Eigen::VectorXd solve(const Eigen::VectorXd &rhs) const;

private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol_;
};

} // namespace crvi
