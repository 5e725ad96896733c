#include "crvi/stepper.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace crvi {

void ProblemSpec::validate(unsigned seed, double box, int pair_count) const {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-box, box);
  double slope_f = 0.0, slope_g = 0.0;
  for (int it = 0; it < pair_count; ++it) {
    const double a1 = uni(rng), b1 = uni(rng);
    const double a2 = uni(rng), b2 = uni(rng);
    const double dist = std::hypot(a2 - a1, b2 - b1);
    if (dist < 1e-12)
      continue;
    slope_f = std::max(
        slope_f, std::abs(reactions.f(a2, b2) - reactions.f(a1, b1)) / dist);
    slope_g = std::max(
        slope_g, std::abs(reactions.g(a2, b2) - reactions.g(a1, b1)) / dist);
  }
  const double sampled = std::max(slope_f, slope_g);
  if (sampled > reactions.lipschitz * 1.01)
    throw std::invalid_argument(
        "declared reaction Lipschitz constant " +
        std::to_string(reactions.lipschitz) +
        " underestimates the sampled slope " + std::to_string(sampled));
  const double origin = std::max(reactions.f(0.0, 0.0), reactions.g(0.0, 0.0));
  if (origin > reactions.origin_bound + 1e-12 * (1.0 + std::abs(origin)))
    throw std::invalid_argument(
        "declared reaction origin bound underestimates the actual value");

  for (int e = 0; e < mesh->edge_count(); ++e) {
    const Vec2 &m = mesh->edge(e).midpoint;
    if (a_ini(m.x(), m.y()) > obstacle(m.x(), m.y()) + 1e-12)
      throw std::invalid_argument(
          "initial data exceeds the obstacle at an edge midpoint");
  }
}

namespace {

SparseSymMatrix shifted_system(const SparseSymMatrix &stiff,
                               const Eigen::VectorXd &mass, double dt) {
  SparseSymMatrix h;
  Eigen::SparseMatrix<double> diag(mass.size(), mass.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mass.size());
  for (int i = 0; i < mass.size(); ++i)
    trips.emplace_back(i, i, mass[i] / dt);
  diag.setFromTriplets(trips.begin(), trips.end());
  h.m = stiff.m + diag;
  h.m.makeCompressed();
  return h;
}

void check_step_restriction(const ProblemSpec &spec, double dt) {
  if (!(dt > 0.0))
    throw std::invalid_argument("time step must be positive");
  const double m = spec.reactions.lipschitz;
  if (m > 0.0 && !(dt < 0.5 / m))
    throw std::invalid_argument(
        "time step " + std::to_string(dt) +
        " violates the restriction dt < 1/(2M) for the declared reaction "
        "Lipschitz constant M = " +
        std::to_string(m));
}

} // namespace

SchemeOperators::SchemeOperators(const CrDiscretisation &gd,
                                 const ProblemSpec &spec)
    : mass_(mass_diagonal(gd)),
      stiff_a_(assemble_stiffness(gd, spec.diff_a)),
      stiff_b_(assemble_stiffness(gd, spec.diff_b)) {}

const SchemeOperators::DtSystems &SchemeOperators::systems_for(double dt) {
  for (const auto &entry : cache_)
    if (std::abs(entry->dt - dt) <= 1e-12 * dt)
      return *entry;
  auto sys = std::make_unique<DtSystems>();
  sys->dt = dt;
  sys->h_a = shifted_system(stiff_a_, mass_, dt);
  sys->h_b = std::make_unique<SpdFactor>(shifted_system(stiff_b_, mass_, dt));
  cache_.push_back(std::move(sys));
  return *cache_.back();
}

StepResult advance_step(const CrDiscretisation &gd, const ProblemSpec &spec,
                        SchemeOperators &ops, const DofVector &a_prev,
                        const DofVector &b_prev, double dt,
                        const StepOptions &opts) {
  check_step_restriction(spec, dt);
  const int n = gd.dof_count();
  if (a_prev.values.size() != n || b_prev.values.size() != n)
    throw std::invalid_argument("advance_step: wrong DOF dimension");
  const Eigen::VectorXd &chi = gd.obstacle_dofs();
  for (int i = 0; i < n; ++i)
    if (a_prev.values[i] > chi[i])
      throw std::invalid_argument(
          "advance_step: previous constrained level is infeasible");

  const auto &sys = ops.systems_for(dt);
  const double dt_used = sys.dt;
  const Eigen::VectorXd &mass = ops.mass();

  StepResult out;
  Eigen::VectorXd wa = a_prev.values, wb = b_prev.values;
  Eigen::VectorXd fvals(n), gvals(n);
  double theta = opts.damping;
  double prev_change = std::numeric_limits<double>::infinity();
  int rises = 0;
  bool solver_failed = false;

  for (int k = 1; k <= opts.picard_max; ++k) {
    out.report.picard_iterations = k;
    for (int i = 0; i < n; ++i) {
      fvals[i] = spec.reactions.f(wa[i], wb[i]);
      gvals[i] = spec.reactions.g(wa[i], wb[i]);
    }
    LcpProblem lcp;
    lcp.h = &sys.h_a;
    lcp.q = (mass.array() / dt_used * a_prev.values.array() +
             mass.array() * fvals.array())
                .matrix();
    lcp.upper = chi;
    const LcpSolution sol = solve_psor(lcp, wa, opts.psor);
    out.report.psor_sweeps += sol.sweeps;
    if (!sol.converged) {
      solver_failed = true;
      wa = sol.x;
      break;
    }
    const Eigen::VectorXd rhs_b =
        (mass.array() / dt_used * b_prev.values.array() +
         mass.array() * gvals.array())
            .matrix();
    const Eigen::VectorXd xb = sys.h_b->solve(rhs_b);

    Eigen::VectorXd na = (wa + theta * (sol.x - wa)).cwiseMin(chi);
    Eigen::VectorXd nb = wb + theta * (xb - wb);
    const double change = std::max((na - wa).lpNorm<Eigen::Infinity>(),
                                   (nb - wb).lpNorm<Eigen::Infinity>());
    out.report.change_history.push_back(change);
    wa = std::move(na);
    wb = std::move(nb);
    out.report.final_change = change;

    if (k >= 2 && change > prev_change) {
      out.report.change_monotone = false;
      if (++rises >= 2) {
        theta *= 0.5;
        rises = 0;
      }
    } else if (k >= 2) {
      rises = 0;
    }
    prev_change = change;
    if (change <= opts.picard_tol) {
      out.report.converged = true;
      break;
    }
  }
  out.report.damping_final = theta;
  if (solver_failed)
    out.report.converged = false;

  // Strong-form residual of the converged step, reactions at the final pair.
  for (int i = 0; i < n; ++i)
    fvals[i] = spec.reactions.f(wa[i], wb[i]);
  const Eigen::VectorXd r =
      (mass.array() / dt_used * (wa - a_prev.values).array()).matrix() +
      ops.stiffness_a().m * wa - (mass.array() * fvals.array()).matrix();
  double sign = 0.0, comp = 0.0;
  for (int i = 0; i < n; ++i) {
    sign = std::max(sign, r[i]);
    comp = std::max(comp,
                    std::abs(r[i] * (wa[i] - chi[i])) / (1.0 + std::abs(chi[i])));
  }
  out.report.residual_sign = std::max(0.0, sign);
  out.report.residual_complementarity = comp;

  out.a = DofVector{std::move(wa), FieldRole::constrained};
  out.b = DofVector{std::move(wb), FieldRole::free_field};
  return out;
}

StepResult advance_step(const CrDiscretisation &gd, const ProblemSpec &spec,
                        const DofVector &a_prev, const DofVector &b_prev,
                        double dt, const StepOptions &opts) {
  SchemeOperators ops(gd, spec);
  return advance_step(gd, spec, ops, a_prev, b_prev, dt, opts);
}

EvolutionResult solve_evolution(const CrDiscretisation &gd,
                                const ProblemSpec &spec,
                                const StepOptions &opts) {
  check_step_restriction(spec, gd.time_grid().max_step());
  EvolutionResult out;
  out.trajectory.a.push_back(interpolate_initial(gd, spec.a_ini, true));
  out.trajectory.b.push_back(interpolate_initial(gd, spec.b_ini, false));

  SchemeOperators ops(gd, spec);
  const int steps = gd.time_grid().steps();
  for (int s = 0; s < steps; ++s) {
    StepResult res =
        advance_step(gd, spec, ops, out.trajectory.a.back(),
                     out.trajectory.b.back(), gd.time_grid().dt(s), opts);
    out.trajectory.a.push_back(std::move(res.a));
    out.trajectory.b.push_back(std::move(res.b));
    out.trajectory.steps.push_back(std::move(res.report));
    if (!out.trajectory.steps.back().converged) {
      out.failed_step = s;
      return out;
    }
  }
  out.converged = true;
  return out;
}

bool trajectory_feasible(const CrDiscretisation &gd, const Trajectory &traj) {
  const Eigen::VectorXd &chi = gd.obstacle_dofs();
  for (const auto &level : traj.a)
    for (int i = 0; i < chi.size(); ++i)
      if (level.values[i] > chi[i])
        return false;
  return true;
}

} // namespace crvi
