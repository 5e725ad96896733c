#include "crvi/diagnostics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "crvi/quadrature.hpp"

namespace crvi {

namespace {

TensorField unit_tensor() {
  TensorField t;
  t.value = [](double, double) { return Eigen::Matrix2d::Identity(); };
  t.lower = t.upper = 1.0;
  t.name = "identity";
  return t;
}

double quadratic_form(const SparseSymMatrix &m, const Eigen::VectorXd &v) {
  return v.dot(m.m * v);
}

} // namespace

EstimatorResult estimate_coercivity(const CrDiscretisation &gd, double rel_tol,
                                    int max_iterations) {
  const Eigen::VectorXd mass = mass_diagonal(gd);
  const SparseSymMatrix k1 = assemble_stiffness(gd, unit_tensor());
  const SpdFactor factor(k1);

  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(gd.dof_count());
  for (int i = 0; i < v.size(); ++i)
    v[i] = gauss(rng);
  v.normalize();

  EstimatorResult out;
  double lambda_prev = 0.0;
  for (out.iterations = 1; out.iterations <= max_iterations;
       ++out.iterations) {
    const Eigen::VectorXd mv = mass.cwiseProduct(v);
    Eigen::VectorXd z = factor.solve(mv);
    z.normalize();
    const double num = z.dot(mass.cwiseProduct(z));
    const double den = quadratic_form(k1, z);
    const double lambda = num / den;
    v = z;
    if (out.iterations > 1 &&
        std::abs(lambda - lambda_prev) <= rel_tol * std::abs(lambda)) {
      out.value = std::sqrt(lambda);
      out.converged = true;
      return out;
    }
    lambda_prev = lambda;
  }
  out.value = std::sqrt(lambda_prev);
  out.converged = false;
  return out;
}

double coercivity_quotient(const CrDiscretisation &gd, const DofVector &v) {
  const Eigen::VectorXd mass = mass_diagonal(gd);
  const SparseSymMatrix k1 = assemble_stiffness(gd, unit_tensor());
  const double num = v.values.dot(mass.cwiseProduct(v.values));
  const double den = quadratic_form(k1, v.values);
  return std::sqrt(num / den);
}

namespace {

// Right-hand side of the best-approximation system in the chosen space:
// b_i = integral(w e_i + grad w . grad e_i) with the 7-point rule.
Eigen::VectorXd consistency_rhs(const CrDiscretisation &gd,
                                const ScalarField &w,
                                const VectorField &grad_w, DofClosure space) {
  const Mesh &mesh = gd.mesh();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(closure_size(gd, space));
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto &t = mesh.cell(c);
    const auto &ce = mesh.cell_edges(c);
    const auto &grads = gd.basis_gradients(c);
    const double area = mesh.cell_area(c);
    for (const auto &qp : quad::seven_point_rule) {
      const Vec2 x = qp.l0 * mesh.vertex(t[0]) + qp.l1 * mesh.vertex(t[1]) +
                     qp.l2 * mesh.vertex(t[2]);
      const double wv = w(x.x(), x.y());
      const Vec2 gw = grad_w(x.x(), x.y());
      const std::array<double, 3> lam = {qp.l0, qp.l1, qp.l2};
      for (int k = 0; k < 3; ++k) {
        const int i = space == DofClosure::interior ? gd.dof_of_edge(ce[k])
                                                    : ce[k];
        if (i < 0)
          continue;
        const double ev = 1.0 - 2.0 * lam[k];
        b[i] += area * qp.w * (wv * ev + gw.dot(grads[k]));
      }
    }
  }
  return b;
}

} // namespace

double consistency_objective(const CrDiscretisation &gd, const ScalarField &w,
                             const VectorField &grad_w,
                             const Eigen::VectorXd &candidate,
                             DofClosure space) {
  if (candidate.size() != closure_size(gd, space))
    throw std::invalid_argument("consistency candidate has wrong dimension");
  const Mesh &mesh = gd.mesh();
  double acc = 0.0;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto &t = mesh.cell(c);
    const auto &ce = mesh.cell_edges(c);
    const auto &grads = gd.basis_gradients(c);
    const double area = mesh.cell_area(c);
    std::array<double, 3> loc{};
    Vec2 gphi = Vec2::Zero();
    for (int k = 0; k < 3; ++k) {
      const int i =
          space == DofClosure::interior ? gd.dof_of_edge(ce[k]) : ce[k];
      loc[k] = i >= 0 ? candidate[i] : 0.0;
      gphi += loc[k] * grads[k];
    }
    for (const auto &qp : quad::seven_point_rule) {
      const Vec2 x = qp.l0 * mesh.vertex(t[0]) + qp.l1 * mesh.vertex(t[1]) +
                     qp.l2 * mesh.vertex(t[2]);
      const std::array<double, 3> lam = {qp.l0, qp.l1, qp.l2};
      double phi = 0.0;
      for (int k = 0; k < 3; ++k)
        phi += loc[k] * (1.0 - 2.0 * lam[k]);
      const double dv = phi - w(x.x(), x.y());
      const Vec2 dg = gphi - grad_w(x.x(), x.y());
      acc += area * qp.w * (dv * dv + dg.squaredNorm());
    }
  }
  return std::sqrt(std::max(0.0, acc));
}

double estimate_consistency(const CrDiscretisation &gd, const ScalarField &w,
                            const VectorField &grad_w, bool constrained,
                            DofClosure space) {
  SparseSymMatrix h = assemble_mass(gd, space);
  h.m = h.m + assemble_stiffness(gd, unit_tensor(), space).m;
  h.m.makeCompressed();
  const Eigen::VectorXd b = consistency_rhs(gd, w, grad_w, space);

  Eigen::VectorXd phi;
  if (!constrained) {
    phi = SpdFactor(h).solve(b);
  } else {
    LcpProblem p;
    p.h = &h;
    p.q = b;
    p.upper = space == DofClosure::interior
                  ? gd.obstacle_dofs()
                  : gd.obstacle_edges();
    PsorOptions opts;
    opts.tol = 1e-12;
    const Eigen::VectorXd x0 = p.upper.cwiseMin(0.0);
    const LcpSolution sol = solve_psor(p, x0, opts);
    phi = sol.x;
  }
  return consistency_objective(gd, w, grad_w, phi, space);
}

namespace {

Eigen::VectorXd conformity_defect(const CrDiscretisation &gd,
                                  const VectorField &psi,
                                  const ScalarField &div_psi) {
  const Mesh &mesh = gd.mesh();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(gd.dof_count());
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto &t = mesh.cell(c);
    const auto &ce = mesh.cell_edges(c);
    const auto &grads = gd.basis_gradients(c);
    const double area = mesh.cell_area(c);
    for (const auto &qp : quad::seven_point_rule) {
      const Vec2 x = qp.l0 * mesh.vertex(t[0]) + qp.l1 * mesh.vertex(t[1]) +
                     qp.l2 * mesh.vertex(t[2]);
      const Vec2 pv = psi(x.x(), x.y());
      const double dv = div_psi(x.x(), x.y());
      const std::array<double, 3> lam = {qp.l0, qp.l1, qp.l2};
      for (int k = 0; k < 3; ++k) {
        const int i = gd.dof_of_edge(ce[k]);
        if (i < 0)
          continue;
        b[i] += area * qp.w *
                (grads[k].dot(pv) + (1.0 - 2.0 * lam[k]) * dv);
      }
    }
  }
  return b;
}

} // namespace

double estimate_limit_conformity(const CrDiscretisation &gd,
                                 const VectorField &psi,
                                 const ScalarField &div_psi) {
  const SparseSymMatrix k1 = assemble_stiffness(gd, unit_tensor());
  const Eigen::VectorXd b = conformity_defect(gd, psi, div_psi);
  const Eigen::VectorXd z = SpdFactor(k1).solve(b);
  return std::sqrt(std::max(0.0, b.dot(z)));
}

double limit_conformity_quotient(const CrDiscretisation &gd,
                                 const VectorField &psi,
                                 const ScalarField &div_psi,
                                 const DofVector &candidate) {
  const SparseSymMatrix k1 = assemble_stiffness(gd, unit_tensor());
  const Eigen::VectorXd b = conformity_defect(gd, psi, div_psi);
  const double den = std::sqrt(quadratic_form(k1, candidate.values));
  if (den == 0.0)
    throw std::invalid_argument("candidate has zero gradient norm");
  return std::abs(b.dot(candidate.values)) / den;
}

DualNormOperator::DualNormOperator(const CrDiscretisation &gd)
    : mass_(mass_diagonal(gd)),
      k1_(assemble_stiffness(gd, unit_tensor())),
      factor_(k1_) {}

double DualNormOperator::operator()(const Eigen::VectorXd &dofs) const {
  const Eigen::VectorXd b = mass_.cwiseProduct(dofs);
  const Eigen::VectorXd z = factor_.solve(b);
  return std::sqrt(std::max(0.0, b.dot(z)));
}

double dual_norm(const CrDiscretisation &gd, const DofVector &u) {
  return DualNormOperator(gd)(u.values);
}

TrajectoryDiagnostics energy_report(const CrDiscretisation &gd,
                                    const Trajectory &traj) {
  const TimeGrid &grid = gd.time_grid();
  const int steps = grid.steps();
  if (static_cast<int>(traj.a.size()) != steps + 1 ||
      static_cast<int>(traj.b.size()) != steps + 1)
    throw std::invalid_argument("trajectory does not match the time grid");

  const Eigen::VectorXd mass = mass_diagonal(gd);
  const SparseSymMatrix k1 = assemble_stiffness(gd, unit_tensor());
  const DualNormOperator dual(gd);

  const auto mass_sq = [&](const Eigen::VectorXd &v) {
    return v.dot(mass.cwiseProduct(v));
  };

  TrajectoryDiagnostics out;
  double delta_a = 0.0, grad_b = 0.0, dual_b = 0.0;
  for (int n = 0; n < steps; ++n) {
    const double dt = grid.dt(n);
    const Eigen::VectorXd da = (traj.a[n + 1].values - traj.a[n].values) / dt;
    const Eigen::VectorXd db = (traj.b[n + 1].values - traj.b[n].values) / dt;
    delta_a += dt * mass_sq(da);
    grad_b += dt * quadratic_form(k1, traj.b[n + 1].values);
    const double d = dual(db);
    dual_b += dt * d * d;
  }
  out.energy.delta_a_l2l2 = std::sqrt(delta_a);
  out.energy.grad_b_l2l2 = std::sqrt(grad_b);
  out.dual_b_integral = dual_b;

  double ga = 0.0, bb = 0.0;
  for (int n = 0; n <= steps; ++n) {
    ga = std::max(ga, quadratic_form(k1, traj.a[n].values));
    bb = std::max(bb, mass_sq(traj.b[n].values));
  }
  out.energy.grad_a_linf_l2 = std::sqrt(ga);
  out.energy.b_linf_l2 = std::sqrt(bb);

  for (const auto &s : traj.steps) {
    out.max_residual_sign = std::max(out.max_residual_sign, s.residual_sign);
    out.max_residual_complementarity = std::max(
        out.max_residual_complementarity, s.residual_complementarity);
  }
  return out;
}

} // namespace crvi
