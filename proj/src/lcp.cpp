#include "crvi/lcp.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crvi {

namespace {

void validate(const LcpProblem &p) {
  if (!p.h)
    throw std::invalid_argument("LCP problem has no matrix");
  const int n = p.h->dim();
  if (p.q.size() != n || p.upper.size() != n)
    throw std::invalid_argument("LCP problem has inconsistent dimensions");
}

Eigen::VectorXd kkt_residual(const LcpProblem &p, const Eigen::VectorXd &x) {
  return p.h->m * x - p.q;
}

void fill_residuals(const LcpProblem &p, LcpSolution &sol) {
  const Eigen::VectorXd r = kkt_residual(p, sol.x);
  double sign = 0.0, comp = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    sign = std::max(sign, r[i]);
    const double u = p.upper[i];
    const double scale =
        std::isfinite(u) ? std::abs(sol.x[i] - u) / (1.0 + std::abs(u)) : 1.0;
    comp = std::max(comp, std::abs(r[i]) * scale);
  }
  sol.residual_sign = std::max(0.0, sign);
  sol.residual_complementarity = comp;
}

} // namespace

LcpSolution solve_psor(const LcpProblem &p, const Eigen::VectorXd &x0,
                       const PsorOptions &opts) {
  validate(p);
  const int n = p.h->dim();
  if (x0.size() != n)
    throw std::invalid_argument("PSOR start vector has wrong dimension");
  if (!(opts.omega > 0.0 && opts.omega < 2.0))
    throw std::invalid_argument("PSOR needs omega in (0, 2)");

  const Eigen::SparseMatrix<double> &h = p.h->m;
  Eigen::VectorXd diag(n);
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) {
    diag[i] = h.coeff(i, i);
    max_diag = std::max(max_diag, std::abs(diag[i]));
  }
  for (int i = 0; i < n; ++i)
    if (!(diag[i] > 1e-14 * max_diag) || !(diag[i] > 0.0))
      throw std::invalid_argument(
          "PSOR rejected: (near-)singular diagonal entry");

  LcpSolution sol;
  sol.x = x0.cwiseMin(p.upper);
  Eigen::VectorXd &x = sol.x;

  // Column j of the column-major symmetric matrix doubles as row j.
  const int *outer = h.outerIndexPtr();
  const int *inner = h.innerIndexPtr();
  const double *vals = h.valuePtr();

  const auto energy = [&]() {
    return 0.5 * x.dot(h * x) - p.q.dot(x);
  };

  double threshold = opts.tol * opts.tol;
  for (sol.sweeps = 0; sol.sweeps < opts.max_sweeps;) {
    double decrease = 0.0;
    for (int i = 0; i < n; ++i) {
      double hx = 0.0;
      for (int k = outer[i]; k < outer[i + 1]; ++k)
        hx += vals[k] * x[inner[k]];
      const double r = hx - p.q[i];
      const double xn =
          std::min(p.upper[i], x[i] - opts.omega * r / diag[i]);
      const double d = xn - x[i];
      decrease -= d * r + 0.5 * d * d * diag[i];
      x[i] = xn;
    }
    ++sol.sweeps;
    if (opts.record_energy)
      sol.energy_history.push_back(energy());
    if (decrease < threshold) {
      fill_residuals(p, sol);
      if (sol.residual_sign <= opts.tol &&
          sol.residual_complementarity <= opts.tol) {
        sol.converged = true;
        return sol;
      }
      if (decrease == 0.0)
        break; // fixed point; the target tolerance is below what FP resolves
      threshold *= 1e-2;
    }
  }
  fill_residuals(p, sol);
  sol.converged = sol.residual_sign <= opts.tol &&
                  sol.residual_complementarity <= opts.tol;
  return sol;
}

Eigen::VectorXd solve_active_set(const LcpProblem &p) {
  validate(p);
  const int n = p.h->dim();
  if (n > 15)
    throw std::invalid_argument("active-set enumeration limited to n <= 15");
  const Eigen::MatrixXd h = Eigen::MatrixXd(p.h->m);
  const double eps = 1e-9 * (1.0 + p.q.cwiseAbs().maxCoeff());

  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    bool usable = true;
    std::vector<int> active, inactive;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        if (!std::isfinite(p.upper[i])) {
          usable = false;
          break;
        }
        active.push_back(i);
      } else {
        inactive.push_back(i);
      }
    }
    if (!usable)
      continue;

    Eigen::VectorXd x(n);
    for (int i : active)
      x[i] = p.upper[i];
    if (!inactive.empty()) {
      const int m = static_cast<int>(inactive.size());
      Eigen::MatrixXd hii(m, m);
      Eigen::VectorXd rhs(m);
      for (int a = 0; a < m; ++a) {
        rhs[a] = p.q[inactive[a]];
        for (int i : active)
          rhs[a] -= h(inactive[a], i) * p.upper[i];
        for (int b = 0; b < m; ++b)
          hii(a, b) = h(inactive[a], inactive[b]);
      }
      const Eigen::VectorXd xi = hii.llt().solve(rhs);
      for (int a = 0; a < m; ++a)
        x[inactive[a]] = xi[a];
    }

    const Eigen::VectorXd r = h * x - p.q;
    bool ok = true;
    for (int i : active)
      ok = ok && r[i] <= eps;
    for (int i : inactive)
      ok = ok && (!std::isfinite(p.upper[i]) || x[i] <= p.upper[i] + eps);
    if (ok)
      return x.cwiseMin(p.upper);
  }
  throw std::runtime_error(
      "active-set enumeration found no KKT point (matrix not SPD?)");
}

SpdSolveResult solve_spd(const SparseSymMatrix &h, const Eigen::VectorXd &rhs,
                         double tol, int max_iterations) {
  if (rhs.size() != h.dim())
    throw std::invalid_argument("solve_spd dimension mismatch");
  SpdSolveResult out;
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    out.x = Eigen::VectorXd::Zero(h.dim());
    out.converged = true;
    return out;
  }
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                           Eigen::Lower | Eigen::Upper>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(max_iterations > 0 ? max_iterations
                                         : std::max(200, 20 * h.dim()));
  cg.compute(h.m);
  out.x = cg.solve(rhs);
  out.iterations = static_cast<int>(cg.iterations());
  out.rel_residual = (h.m * out.x - rhs).norm() / rhs_norm;
  out.converged = out.rel_residual <= tol * 1.0001;
  return out;
}

SpdFactor::SpdFactor(const SparseSymMatrix &h) {
  chol_.compute(h.m);
  if (chol_.info() != Eigen::Success)
    throw std::runtime_error("sparse factorization failed (not SPD?)");
}

Eigen::VectorXd SpdFactor::solve(const Eigen::VectorXd &rhs) const {
  return chol_.solve(rhs);
}

} // namespace crvi
