#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <vector>

#include "crvi/assembly.hpp"
#include "crvi/discretisation.hpp"
#include "crvi/fields.hpp"
#include "crvi/lcp.hpp"
#include "crvi/stepper.hpp"

using namespace crvi;

namespace {

std::shared_ptr<const Mesh> structured(int n) {
  return std::make_shared<const Mesh>(build_structured_triangulation(n));
}

ProblemSpec make_spec(std::shared_ptr<const Mesh> mesh, double horizon,
                      const std::string &reaction, const std::string &obstacle,
                      const std::string &a_ini, const std::string &b_ini,
                      const std::string &diff_a = "identity",
                      const std::string &diff_b = "identity") {
  ProblemSpec spec;
  spec.mesh = std::move(mesh);
  spec.horizon = horizon;
  spec.diff_a = parse_tensor_field(diff_a);
  spec.diff_b = parse_tensor_field(diff_b);
  spec.reactions = parse_reaction(reaction);
  spec.obstacle = parse_scalar_field(obstacle);
  spec.a_ini = parse_scalar_field(a_ini);
  spec.b_ini = parse_scalar_field(b_ini);
  return spec;
}

CrDiscretisation make_gd(const ProblemSpec &spec, int steps) {
  return CrDiscretisation(spec.mesh, TimeGrid::uniform(spec.horizon, steps),
                          spec.obstacle);
}

// M/dt + K as an explicit sparse matrix, assembled in the test.
SparseSymMatrix shifted(const SparseSymMatrix &stiff,
                        const Eigen::VectorXd &mass, double dt) {
  SparseSymMatrix h;
  Eigen::SparseMatrix<double> diag(mass.size(), mass.size());
  for (int i = 0; i < mass.size(); ++i)
    diag.insert(i, i) = mass[i] / dt;
  h.m = stiff.m + diag;
  return h;
}

} // namespace

TEST_CASE("problem validation") {
  auto mesh = structured(2);

  SUBCASE("a consistent preset passes") {
    const ProblemSpec spec = make_spec(mesh, 1.0, "linear:0.5,0.5,0.3,0.2,1,1",
                                       "constant:1", "zero", "zero");
    CHECK_NOTHROW(spec.validate(1234, 2.0));
  }

  SUBCASE("an understated Lipschitz constant is rejected") {
    ProblemSpec spec = make_spec(mesh, 1.0, "zero", "constant:1", "zero",
                                 "zero");
    spec.reactions.f = [](double, double b) { return b; }; // true slope 1
    spec.reactions.g = [](double, double) { return 0.0; };
    spec.reactions.lipschitz = 0.1;
    spec.reactions.origin_bound = 0.0;
    CHECK_THROWS_AS(spec.validate(1234, 2.0), std::invalid_argument);
  }

  SUBCASE("an understated origin bound is rejected") {
    ProblemSpec spec = make_spec(mesh, 1.0, "zero", "constant:1", "zero",
                                 "zero");
    spec.reactions.f = [](double, double) { return 0.5; };
    spec.reactions.g = [](double, double) { return 0.0; };
    spec.reactions.lipschitz = 0.0;
    spec.reactions.origin_bound = 0.0; // actual value at the origin is 0.5
    CHECK_THROWS_AS(spec.validate(1234, 2.0), std::invalid_argument);
  }

  SUBCASE("initial data above the barrier is rejected") {
    const ProblemSpec spec = make_spec(mesh, 1.0, "zero", "constant:0.5",
                                       "constant:0.7", "zero");
    CHECK_THROWS_AS(spec.validate(1234, 2.0), std::invalid_argument);
  }
}

TEST_CASE("time-step restriction") {
  auto mesh = structured(2);
  // Slopes 2 in both reactions: M = 2, so the scheme needs dt < 0.25.
  const ProblemSpec spec = make_spec(mesh, 1.0, "linear:0,2,0,2,0,0",
                                     "constant:1e6", "zero", "zero");
  CHECK(spec.reactions.lipschitz == doctest::Approx(2.0).epsilon(1e-12));
  const CrDiscretisation gd = make_gd(spec, 4);
  DofVector zero;
  zero.values = Eigen::VectorXd::Zero(gd.dof_count());

  CHECK_THROWS_AS(advance_step(gd, spec, zero, zero, 0.3, StepOptions{}),
                  std::invalid_argument);
  // The bound is strict.
  CHECK_THROWS_AS(advance_step(gd, spec, zero, zero, 0.25, StepOptions{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(advance_step(gd, spec, zero, zero, -0.1, StepOptions{}),
                  std::invalid_argument);
  CHECK_NOTHROW(advance_step(gd, spec, zero, zero, 0.2, StepOptions{}));

  // The evolution driver applies the same check to the whole grid
  // (horizon 1 with 4 steps means dt = 0.25, again out of bounds).
  CHECK_THROWS_AS(solve_evolution(gd, spec, StepOptions{}),
                  std::invalid_argument);
}

TEST_CASE("zero data is an exact fixed point") {
  auto mesh = structured(2);
  const ProblemSpec spec =
      make_spec(mesh, 1.0, "zero", "constant:1e6", "zero", "zero");
  const CrDiscretisation gd = make_gd(spec, 4);
  DofVector zero;
  zero.values = Eigen::VectorXd::Zero(gd.dof_count());

  const StepResult res = advance_step(gd, spec, zero, zero, 0.25,
                                      StepOptions{});
  CHECK(res.report.converged);
  CHECK(res.report.picard_iterations == 1);
  CHECK(res.a.values.norm() == 0.0);
  CHECK(res.b.values.norm() == 0.0);
  CHECK(res.report.residual_sign == 0.0);
  CHECK(res.report.residual_complementarity == 0.0);

  const EvolutionResult evo = solve_evolution(gd, spec, StepOptions{});
  REQUIRE(evo.converged);
  for (const auto &level : evo.trajectory.a)
    CHECK(level.values.norm() == 0.0);
  for (const auto &level : evo.trajectory.b)
    CHECK(level.values.norm() == 0.0);
}

TEST_CASE("inactive barrier reduces the step to two linear solves") {
  auto mesh = structured(4);
  const ProblemSpec spec = make_spec(mesh, 1.0, "zero", "constant:1e6",
                                     "bump:0.8", "wells:0.6", "identity",
                                     "scaled:0.5");
  const CrDiscretisation gd = make_gd(spec, 10);
  const double dt = 0.1;

  const DofVector a0 = interpolate_initial(gd, spec.a_ini, true);
  const DofVector b0 = interpolate_initial(gd, spec.b_ini, false);
  const StepResult res = advance_step(gd, spec, a0, b0, dt, StepOptions{});
  REQUIRE(res.report.converged);

  // Manual route: assemble M/dt + K per field and run the plain CG solver;
  // the step's PSOR (for A) and LDLT (for B) must land on the same vectors.
  const Eigen::VectorXd mass = mass_diagonal(gd);
  const SparseSymMatrix ha = shifted(assemble_stiffness(gd, spec.diff_a),
                                     mass, dt);
  const SparseSymMatrix hb = shifted(assemble_stiffness(gd, spec.diff_b),
                                     mass, dt);
  const Eigen::VectorXd rhs_a =
      (mass.array() / dt * a0.values.array()).matrix();
  const Eigen::VectorXd rhs_b =
      (mass.array() / dt * b0.values.array()).matrix();
  const SpdSolveResult xa = solve_spd(ha, rhs_a);
  const SpdSolveResult xb = solve_spd(hb, rhs_b);
  REQUIRE(xa.converged);
  REQUIRE(xb.converged);
  CHECK((res.a.values - xa.x).lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK((res.b.values - xb.x).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("converged steps satisfy the discrete equations") {
  auto mesh = structured(4);
  const ProblemSpec spec = make_spec(mesh, 0.5, "clamped-monod:1,0.5,1,2",
                                     "dome:0.05,0.1", "constant:0.04",
                                     "bump:1");
  const CrDiscretisation gd = make_gd(spec, 8);
  spec.validate(1234, 2.0);

  const EvolutionResult evo = solve_evolution(gd, spec, StepOptions{});
  REQUIRE(evo.converged);
  REQUIRE(trajectory_feasible(gd, evo.trajectory));

  const Eigen::VectorXd mass = mass_diagonal(gd);
  const SparseSymMatrix ka = assemble_stiffness(gd, spec.diff_a);
  const SparseSymMatrix kb = assemble_stiffness(gd, spec.diff_b);
  const Eigen::VectorXd &chi = gd.obstacle_dofs();
  const double dt = gd.time_grid().dt(0);

  for (int s = 0; s < gd.time_grid().steps(); ++s) {
    CAPTURE(s);
    const Eigen::VectorXd &a0 = evo.trajectory.a[s].values;
    const Eigen::VectorXd &a1 = evo.trajectory.a[s + 1].values;
    const Eigen::VectorXd &b0 = evo.trajectory.b[s].values;
    const Eigen::VectorXd &b1 = evo.trajectory.b[s + 1].values;

    Eigen::VectorXd fv(a1.size()), gv(a1.size());
    for (int i = 0; i < a1.size(); ++i) {
      fv[i] = spec.reactions.f(a1[i], b1[i]);
      gv[i] = spec.reactions.g(a1[i], b1[i]);
    }

    // Free field: the linear equation holds up to the Picard tolerance.
    const Eigen::VectorXd rb =
        (mass.array() / dt * (b1 - b0).array()).matrix() + kb.m * b1 -
        (mass.array() * gv.array()).matrix();
    CHECK(rb.lpNorm<Eigen::Infinity>() <= 1e-8);

    // Constrained field: feasibility is exact and the KKT residuals hold.
    const Eigen::VectorXd ra =
        (mass.array() / dt * (a1 - a0).array()).matrix() + ka.m * a1 -
        (mass.array() * fv.array()).matrix();
    for (int i = 0; i < a1.size(); ++i) {
      CHECK(a1[i] <= chi[i]);
      CHECK(ra[i] <= 1e-8);
      CHECK(std::abs(ra[i] * (a1[i] - chi[i])) / (1.0 + std::abs(chi[i])) <=
            1e-8);
    }
    CHECK(evo.trajectory.steps[s].residual_sign <= 1e-8);
    CHECK(evo.trajectory.steps[s].residual_complementarity <= 1e-8);
  }
}

TEST_CASE("single-step evolution equals one advance") {
  auto mesh = structured(2);
  const ProblemSpec spec = make_spec(mesh, 0.2, "linear:0.3,0.4,0.2,0.3,1,1",
                                     "constant:2", "zero", "bump:0.5");
  const CrDiscretisation gd = make_gd(spec, 1);

  const EvolutionResult evo = solve_evolution(gd, spec, StepOptions{});
  REQUIRE(evo.converged);

  const DofVector a0 = interpolate_initial(gd, spec.a_ini, true);
  const DofVector b0 = interpolate_initial(gd, spec.b_ini, false);
  const StepResult res = advance_step(gd, spec, a0, b0, 0.2, StepOptions{});
  REQUIRE(res.report.converged);

  CHECK((evo.trajectory.a[1].values - res.a.values).norm() == 0.0);
  CHECK((evo.trajectory.b[1].values - res.b.values).norm() == 0.0);
  CHECK(evo.trajectory.steps[0].picard_iterations ==
        res.report.picard_iterations);
}

TEST_CASE("strong forcing against a low barrier") {
  auto mesh = structured(4);
  // F = -0.5 a + 8 pushes the constrained field hard against chi = 0.1.
  const ProblemSpec spec = make_spec(mesh, 0.5, "linear:0,0.5,0,0.5,8,1",
                                     "constant:0.1", "zero", "bump:1");
  const CrDiscretisation gd = make_gd(spec, 4);
  spec.validate(1234, 2.0);

  const EvolutionResult evo = solve_evolution(gd, spec, StepOptions{});
  REQUIRE(evo.converged);
  CHECK(trajectory_feasible(gd, evo.trajectory));
  CHECK(evo.failed_step == -1);
  REQUIRE(evo.trajectory.a.size() == 5);
  REQUIRE(evo.trajectory.b.size() == 5);
  REQUIRE(evo.trajectory.steps.size() == 4);

  // Level zero is the clamped interpolant of the initial data.
  const DofVector a0 = interpolate_initial(gd, spec.a_ini, true);
  CHECK((evo.trajectory.a[0].values - a0.values).norm() == 0.0);
  CHECK(evo.trajectory.a[0].role == FieldRole::constrained);
  CHECK(evo.trajectory.b[0].role == FieldRole::free_field);

  const Eigen::VectorXd &chi = gd.obstacle_dofs();
  const Eigen::VectorXd &final_a = evo.trajectory.a.back().values;
  CHECK((final_a.array() <= chi.array()).all());
  // The forcing is strong enough that the bound binds exactly somewhere.
  CHECK((chi - final_a).minCoeff() == 0.0);
  int active = 0;
  for (int i = 0; i < final_a.size(); ++i)
    if (final_a[i] == chi[i])
      ++active;
  CHECK(active > final_a.size() / 2);

  for (const auto &report : evo.trajectory.steps) {
    CHECK(report.residual_sign <= 1e-8);
    CHECK(report.residual_complementarity <= 1e-8);
    CHECK(report.final_change <= 1e-11);
    CHECK(static_cast<int>(report.change_history.size()) ==
          report.picard_iterations);
  }
}

TEST_CASE("failure reporting when the iteration budget is too small") {
  auto mesh = structured(2);
  const ProblemSpec spec = make_spec(mesh, 1.0, "linear:0.9,0,0.9,0,1,1",
                                     "constant:1e6", "zero", "zero");
  const CrDiscretisation gd = make_gd(spec, 4);
  StepOptions opts;
  opts.picard_max = 1;

  DofVector zero;
  zero.values = Eigen::VectorXd::Zero(gd.dof_count());
  const StepResult res = advance_step(gd, spec, zero, zero, 0.25, opts);
  CHECK_FALSE(res.report.converged);
  CHECK(res.report.picard_iterations == 1);

  const EvolutionResult evo = solve_evolution(gd, spec, opts);
  CHECK_FALSE(evo.converged);
  CHECK(evo.failed_step == 0);
  // The partial trajectory still carries the initial level and the failing
  // iterate.
  CHECK(evo.trajectory.a.size() == 2);
  CHECK(evo.trajectory.b.size() == 2);
  CHECK(evo.trajectory.steps.size() == 1);

  // With the default budget the same problem converges.
  const EvolutionResult ok = solve_evolution(gd, spec, StepOptions{});
  CHECK(ok.converged);
}

TEST_CASE("input guards of advance_step") {
  auto mesh = structured(2);
  const ProblemSpec spec = make_spec(mesh, 1.0, "zero", "constant:0.5",
                                     "zero", "zero");
  const CrDiscretisation gd = make_gd(spec, 4);
  DofVector zero;
  zero.values = Eigen::VectorXd::Zero(gd.dof_count());

  SUBCASE("wrong dimension") {
    DofVector bad;
    bad.values = Eigen::VectorXd::Zero(gd.dof_count() + 1);
    CHECK_THROWS_AS(advance_step(gd, spec, bad, zero, 0.1, StepOptions{}),
                    std::invalid_argument);
  }
  SUBCASE("infeasible previous level") {
    DofVector high;
    high.values = Eigen::VectorXd::Constant(gd.dof_count(), 0.7);
    CHECK_THROWS_AS(advance_step(gd, spec, high, zero, 0.1, StepOptions{}),
                    std::invalid_argument);
  }
}

TEST_CASE("per-dt system cache") {
  auto mesh = structured(2);
  const ProblemSpec spec = make_spec(mesh, 1.0, "zero", "constant:1e6",
                                     "zero", "zero");
  const CrDiscretisation gd = make_gd(spec, 4);
  SchemeOperators ops(gd, spec);

  const auto &s1 = ops.systems_for(0.1);
  const auto &s2 = ops.systems_for(0.1 * (1.0 + 1e-13));
  CHECK(&s1 == &s2); // within relative 1e-12: reuse, and apply the cached dt
  CHECK(s2.dt == 0.1);

  const auto &s3 = ops.systems_for(0.05);
  CHECK(&s3 != &s1);
  CHECK(s3.dt == 0.05);

  // The cached A-side matrix really is M/dt + K.
  const Eigen::VectorXd mass = mass_diagonal(gd);
  const SparseSymMatrix ref = shifted(assemble_stiffness(gd, spec.diff_a),
                                      mass, 0.1);
  CHECK((Eigen::MatrixXd(s1.h_a.m) - Eigen::MatrixXd(ref.m)).norm() <= 1e-13);
}
