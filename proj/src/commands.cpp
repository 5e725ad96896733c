#include "crvi/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "crvi/io.hpp"

namespace crvi {

namespace fs = std::filesystem;

namespace {

constexpr double kErrorFloor = 1e-13; // below this, errors count as zero

std::string istr(long long v) { return std::to_string(v); }

// ---------------------------------------------------------------------------
// Level construction

void check_reaction_step(const ProblemSpec &spec, double dt_max) {
  const double m = spec.reactions.lipschitz;
  if (m > 0.0 && dt_max >= 0.5 / m) {
    std::ostringstream msg;
    msg << "time step " << dt_max
        << " violates the restriction dt < 1/(2M) for the declared reaction "
           "Lipschitz constant M = "
        << m << " (need dt < " << 0.5 / m << ")";
    throw std::invalid_argument(msg.str());
  }
}

// ---------------------------------------------------------------------------
// Cross-level comparison on nested meshes.
//
// The fine mesh of a comparison is a refinement descendant of the coarse
// one, so every fine cell lies inside exactly one coarse cell (found by
// locating its barycenter). Spatial integrals use the 3-point edge-midpoint
// rule on fine cells, which is exact for the quadratic integrands (products
// of two cellwise-affine differences); at a fine edge midpoint the fine
// reconstruction is simply that edge's value.

struct CrossLevel {
  std::vector<int> coarse_cell;
  // per fine cell and fine edge midpoint: the three coarse basis values
  std::vector<std::array<std::array<double, 3>, 3>> coarse_basis;
};

CrossLevel build_cross_level(const LevelSetup &coarse,
                             const LevelSetup &fine) {
  const Mesh &mc = *coarse.mesh;
  const Mesh &mf = *fine.mesh;
  CellLocator locator(coarse.mesh);
  CrossLevel xl;
  xl.coarse_cell.resize(static_cast<std::size_t>(mf.cell_count()));
  xl.coarse_basis.resize(static_cast<std::size_t>(mf.cell_count()));
  for (int c = 0; c < mf.cell_count(); ++c) {
    const int cc = locator.locate(mf.cell_barycenter(c), 1e-10);
    if (cc < 0) {
      throw std::logic_error("point location failed on nested meshes");
    }
    xl.coarse_cell[static_cast<std::size_t>(c)] = cc;
    for (int p = 0; p < 3; ++p) {
      const Edge &edge = mf.edge(mf.cell_edges(c)[p]);
      const auto lambda = mc.barycentric(cc, edge.midpoint);
      for (int k = 0; k < 3; ++k) {
        xl.coarse_basis[static_cast<std::size_t>(c)][p][k] =
            1.0 - 2.0 * lambda[k];
      }
    }
  }
  return xl;
}

Eigen::VectorXd edge_expand(const CrDiscretisation &gd, const DofVector &v) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(gd.mesh().edge_count());
  for (int d = 0; d < gd.dof_count(); ++d) {
    e[gd.edge_of_dof(d)] = v.values[d];
  }
  return e;
}

double l2_value_diff(const CrossLevel &xl, const CrDiscretisation &gdc,
                     const CrDiscretisation &gdf, const Eigen::VectorXd &ec,
                     const Eigen::VectorXd &ef) {
  const Mesh &mf = gdf.mesh();
  const Mesh &mc = gdc.mesh();
  double acc = 0.0;
  for (int c = 0; c < mf.cell_count(); ++c) {
    const auto &fe = mf.cell_edges(c);
    const auto &ce = mc.cell_edges(xl.coarse_cell[static_cast<std::size_t>(c)]);
    double cell = 0.0;
    for (int p = 0; p < 3; ++p) {
      const auto &w = xl.coarse_basis[static_cast<std::size_t>(c)][p];
      const double vc = w[0] * ec[ce[0]] + w[1] * ec[ce[1]] + w[2] * ec[ce[2]];
      const double d = ef[fe[p]] - vc;
      cell += d * d;
    }
    acc += mf.cell_area(c) / 3.0 * cell;
  }
  return std::sqrt(acc);
}

double l2_grad_diff(const CrossLevel &xl, const CrDiscretisation &gdc,
                    const CrDiscretisation &gdf, const Eigen::VectorXd &ec,
                    const Eigen::VectorXd &ef) {
  const Mesh &mf = gdf.mesh();
  const Mesh &mc = gdc.mesh();
  double acc = 0.0;
  for (int c = 0; c < mf.cell_count(); ++c) {
    const auto &fe = mf.cell_edges(c);
    const auto &fg = gdf.basis_gradients(c);
    const Vec2 gf =
        ef[fe[0]] * fg[0] + ef[fe[1]] * fg[1] + ef[fe[2]] * fg[2];
    const int cc = xl.coarse_cell[static_cast<std::size_t>(c)];
    const auto &ce = mc.cell_edges(cc);
    const auto &cg = gdc.basis_gradients(cc);
    const Vec2 gc =
        ec[ce[0]] * cg[0] + ec[ce[1]] * cg[1] + ec[ce[2]] * cg[2];
    acc += mf.cell_area(c) * (gf - gc).squaredNorm();
  }
  return std::sqrt(acc);
}

struct TrajErr {
  double value_linf = 0.0;
  double grad_l2 = 0.0;
};

TrajErr trajectory_errors(const CrossLevel &xl, const CrDiscretisation &gdc,
                          const CrDiscretisation &gdf,
                          const std::vector<DofVector> &lc,
                          const std::vector<DofVector> &lf) {
  const int nc = static_cast<int>(lc.size()) - 1;
  const int nf = static_cast<int>(lf.size()) - 1;
  if (nc < 1 || nf % nc != 0) {
    throw std::logic_error("trajectory step counts are not nested");
  }
  const int ratio = nf / nc;
  TrajErr e;
  double grad_acc = 0.0;
  for (int n = 0; n <= nc; ++n) {
    const Eigen::VectorXd c = edge_expand(gdc, lc[static_cast<std::size_t>(n)]);
    const Eigen::VectorXd f =
        edge_expand(gdf, lf[static_cast<std::size_t>(n * ratio)]);
    e.value_linf = std::max(e.value_linf, l2_value_diff(xl, gdc, gdf, c, f));
    if (n >= 1) {
      const double g = l2_grad_diff(xl, gdc, gdf, c, f);
      grad_acc += gdc.time_grid().dt(n - 1) * g * g;
    }
  }
  e.grad_l2 = std::sqrt(grad_acc);
  return e;
}

// ---------------------------------------------------------------------------
// Artifact writers

void write_text_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
  out << text;
  out.flush();
  if (!out) {
    throw std::runtime_error("write to '" + path.string() + "' failed");
  }
}

CsvTable residual_table(const TimeGrid &grid,
                        const std::vector<StepReport> &steps) {
  CsvTable t;
  t.header = {"step",           "time (1)",
              "picard_iterations", "psor_sweeps",
              "iterate_change (1)", "residual_sign (1)",
              "residual_complementarity_scaled (1)"};
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const StepReport &r = steps[k];
    t.rows.push_back({istr(static_cast<long long>(k) + 1),
                      format_double(grid.times[k + 1]),
                      istr(r.picard_iterations), istr(r.psor_sweeps),
                      format_double(r.final_change),
                      format_double(r.residual_sign),
                      format_double(r.residual_complementarity)});
  }
  return t;
}

void append_energy_rows(CsvTable &t, int level,
                        const TrajectoryDiagnostics &d) {
  const auto row = [&](const char *name, double v) {
    t.rows.push_back({name, istr(level), format_double(v)});
  };
  row("delta_A_L2L2", d.energy.delta_a_l2l2);
  row("grad_A_LinfL2", d.energy.grad_a_linf_l2);
  row("B_LinfL2", d.energy.b_linf_l2);
  row("grad_B_L2L2", d.energy.grad_b_l2l2);
  row("dual_deltaB_integral", d.dual_b_integral);
  row("residual_sign_max", d.max_residual_sign);
  row("residual_complementarity_max", d.max_residual_complementarity);
}

CsvTable energy_table_header() {
  CsvTable t;
  t.header = {"metric", "level", "value (1)"};
  return t;
}

void write_snapshots(const fs::path &dir, const CrDiscretisation &gd,
                     const Trajectory &traj, int stride) {
  const Mesh &mesh = gd.mesh();
  const int count = static_cast<int>(traj.a.size());
  const auto write_one = [&](int n) {
    char name[32];
    std::snprintf(name, sizeof(name), "snapshot_%06d.vtk", n);
    write_vtk_snapshot(
        (dir / name).string(), mesh,
        {{"A", cell_values(gd, traj.a[static_cast<std::size_t>(n)])},
         {"B", cell_values(gd, traj.b[static_cast<std::size_t>(n)])}});
  };
  if (stride <= 0) {
    write_one(count - 1);
    return;
  }
  for (int n = 0; n < count; n += stride) {
    write_one(n);
  }
  if ((count - 1) % stride != 0) {
    write_one(count - 1);
  }
}

void max_step_residuals(const std::vector<StepReport> &steps, double &sign,
                        double &comp) {
  sign = 0.0;
  comp = 0.0;
  for (const auto &s : steps) {
    sign = std::max(sign, s.residual_sign);
    comp = std::max(comp, s.residual_complementarity);
  }
}

// ---------------------------------------------------------------------------
// Diagnostics battery fields

struct BatteryField {
  ScalarField w;
  VectorField grad;
};

BatteryField affine_field() {
  return {[](double x, double y) { return 0.25 + 0.5 * x - 0.3 * y; },
          [](double, double) { return Vec2(0.5, -0.3); }};
}

BatteryField bump_field(double amp) {
  const double pi = std::numbers::pi;
  return {[amp, pi](double x, double y) {
            return amp * std::sin(pi * x) * std::sin(pi * y);
          },
          [amp, pi](double x, double y) {
            return Vec2(amp * pi * std::cos(pi * x) * std::sin(pi * y),
                        amp * pi * std::sin(pi * x) * std::cos(pi * y));
          }};
}

} // namespace

// ---------------------------------------------------------------------------

LevelSetup build_level(const RunConfig &cfg, int level) {
  if (level < 0) {
    throw std::invalid_argument("refinement level must be nonnegative");
  }
  Mesh mesh = build_structured_triangulation(cfg.mesh_n);
  for (int l = 0; l < level; ++l) {
    mesh = refine_uniform(mesh);
  }
  auto mesh_ptr = std::make_shared<const Mesh>(std::move(mesh));

  LevelSetup s;
  s.level = level;
  s.mesh_n = cfg.mesh_n << level;
  s.mesh = mesh_ptr;
  s.problem.mesh = mesh_ptr;
  s.problem.horizon = cfg.horizon;
  s.problem.diff_a = parse_tensor_field(cfg.diff_a);
  s.problem.diff_b = parse_tensor_field(cfg.diff_b);
  s.problem.reactions = parse_reaction(cfg.reaction);
  s.problem.obstacle = parse_scalar_field(cfg.obstacle);
  s.problem.a_ini = parse_scalar_field(cfg.a_ini);
  s.problem.b_ini = parse_scalar_field(cfg.b_ini);

  const int steps = resolved_steps(cfg) << level;
  TimeGrid grid = TimeGrid::uniform(cfg.horizon, steps);
  check_reaction_step(s.problem, grid.max_step());
  s.gd = std::make_shared<CrDiscretisation>(mesh_ptr, std::move(grid),
                                            s.problem.obstacle);
  s.problem.validate(cfg.seed, cfg.lipschitz_box);

  s.options.psor.omega = cfg.psor_omega;
  s.options.psor.tol = cfg.psor_tol;
  s.options.psor.max_sweeps = cfg.psor_max_sweeps;
  s.options.picard_tol = cfg.picard_tol;
  s.options.picard_max = cfg.picard_max;
  s.options.damping = cfg.damping;
  return s;
}

RunOutcome run_single(const RunConfig &cfg) {
  RunOutcome out;
  out.setup = build_level(cfg, 0);
  out.evolution =
      solve_evolution(*out.setup.gd, out.setup.problem, out.setup.options);
  if (out.evolution.converged) {
    out.diagnostics = energy_report(*out.setup.gd, out.evolution.trajectory);
  } else {
    max_step_residuals(out.evolution.trajectory.steps,
                       out.diagnostics.max_residual_sign,
                       out.diagnostics.max_residual_complementarity);
  }
  return out;
}

std::vector<std::array<double, 4>> ConvergeOutcome::orders() const {
  std::vector<std::array<double, 4>> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto order = [&](double e0, double e1) {
      if (e0 <= kErrorFloor || e1 <= kErrorFloor) {
        return nan;
      }
      return std::log2(e0 / e1);
    };
    out.push_back({order(rows[i].err_a, rows[i + 1].err_a),
                   order(rows[i].err_grad_a, rows[i + 1].err_grad_a),
                   order(rows[i].err_b, rows[i + 1].err_b),
                   order(rows[i].err_grad_b, rows[i + 1].err_grad_b)});
  }
  return out;
}

ConvergeOutcome converge_study(const RunConfig &cfg, std::ostream &progress) {
  if (cfg.levels < 3) {
    throw std::invalid_argument(
        "a convergence study needs at least 3 levels");
  }
  const int levels = cfg.levels;

  struct LevelRun {
    LevelSetup setup;
    Trajectory trajectory;
  };
  std::vector<LevelRun> runs;
  ConvergeOutcome out;

  for (int l = 0; l <= levels; ++l) {
    LevelSetup s = build_level(cfg, l);
    progress << (l == levels ? "reference" : "level " + istr(l)) << ": n="
             << s.mesh_n << ", " << s.gd->dof_count() << " unknowns, "
             << s.gd->time_grid().steps() << " steps\n";
    EvolutionResult ev = solve_evolution(*s.gd, s.problem, s.options);
    if (!ev.converged) {
      std::ostringstream msg;
      msg << "level " << l << ": step " << ev.failed_step
          << " did not converge";
      throw SolverFailure(l, ev.failed_step, msg.str());
    }
    out.level_diagnostics.push_back(energy_report(*s.gd, ev.trajectory));
    out.step_reports.push_back(ev.trajectory.steps);
    runs.push_back({std::move(s), std::move(ev.trajectory)});
  }

  const LevelRun &ref = runs.back();
  const auto fill_info = [](ErrorRow &row, const LevelSetup &s) {
    row.level = s.level;
    row.mesh_n = s.mesh_n;
    row.h = mesh_size(*s.mesh);
    row.dofs = s.gd->dof_count();
    row.steps = s.gd->time_grid().steps();
  };

  for (int l = 0; l < levels; ++l) {
    const LevelRun &run = runs[static_cast<std::size_t>(l)];
    const CrossLevel xl = build_cross_level(run.setup, ref.setup);
    const TrajErr ea = trajectory_errors(xl, *run.setup.gd, *ref.setup.gd,
                                         run.trajectory.a, ref.trajectory.a);
    const TrajErr eb = trajectory_errors(xl, *run.setup.gd, *ref.setup.gd,
                                         run.trajectory.b, ref.trajectory.b);
    ErrorRow row;
    fill_info(row, run.setup);
    row.err_a = ea.value_linf;
    row.err_grad_a = ea.grad_l2;
    row.err_b = eb.value_linf;
    row.err_grad_b = eb.grad_l2;
    max_step_residuals(run.trajectory.steps, row.max_residual_sign,
                       row.max_residual_complementarity);
    out.rows.push_back(row);
  }
  fill_info(out.reference, ref.setup);
  max_step_residuals(ref.trajectory.steps, out.reference.max_residual_sign,
                     out.reference.max_residual_complementarity);

  const auto gate_column = [&](const char *name, auto getter) {
    for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
      const double e0 = getter(out.rows[i]);
      const double e1 = getter(out.rows[i + 1]);
      if (e1 < e0 || (e0 <= kErrorFloor && e1 <= kErrorFloor)) {
        continue;
      }
      out.monotone = false;
      std::ostringstream msg;
      msg << name << " does not decrease from level " << out.rows[i].level
          << " to " << out.rows[i + 1].level << " (" << format_double(e0)
          << " -> " << format_double(e1) << ")";
      out.gate_messages.push_back(msg.str());
    }
  };
  gate_column("A value error", [](const ErrorRow &r) { return r.err_a; });
  gate_column("A gradient error",
              [](const ErrorRow &r) { return r.err_grad_a; });
  gate_column("B value error", [](const ErrorRow &r) { return r.err_b; });
  gate_column("B gradient error",
              [](const ErrorRow &r) { return r.err_grad_b; });
  return out;
}

const DiagnoseMetric &DiagnoseOutcome::metric(const std::string &name) const {
  for (const auto &m : metrics) {
    if (m.name == name) {
      return m;
    }
  }
  throw std::out_of_range("no diagnostics metric named '" + name + "'");
}

DiagnoseOutcome diagnose_study(const RunConfig &cfg) {
  if (cfg.levels < 3) {
    throw std::invalid_argument(
        "a diagnostics sweep needs at least 3 levels");
  }
  std::vector<LevelSetup> setups;
  for (int l = 0; l < cfg.levels; ++l) {
    setups.push_back(build_level(cfg, l));
  }

  DiagnoseOutcome out;
  for (const auto &s : setups) {
    out.mesh_n.push_back(s.mesh_n);
    out.h.push_back(mesh_size(*s.mesh));
  }

  // Barrier-feasible amplitude for the constrained battery row: keep the
  // field under the barrier averages on every level, with margin.
  double chi_min = std::numeric_limits<double>::infinity();
  for (const auto &s : setups) {
    if (s.gd->dof_count() > 0) {
      chi_min = std::min(chi_min, s.gd->obstacle_dofs().minCoeff());
    }
  }
  const double amp = std::max(0.0, std::min(0.4, 0.8 * chi_min));

  const BatteryField affine = affine_field();
  const BatteryField bump = bump_field(1.0);
  const BatteryField bump_c = bump_field(amp);
  const double pi = std::numbers::pi;
  const VectorField uniform_x = [](double, double) { return Vec2(1.0, 0.0); };
  const ScalarField div_zero = [](double, double) { return 0.0; };
  const VectorField grad_bump = bump_field(1.0).grad;
  const ScalarField div_grad_bump = [pi](double x, double y) {
    return -2.0 * pi * pi * std::sin(pi * x) * std::sin(pi * y);
  };
  // Note: a radial field (x, y) would be useless here: its normal component
  // is constant along every straight edge, so its defect against zero-mean
  // interface jumps vanishes identically. The shear field below varies along
  // edges and probes the nonconformity for real.
  const VectorField shear = [](double, double y) { return Vec2(y, 0.0); };
  const ScalarField div_shear = [](double, double) { return 0.0; };

  DiagnoseMetric cd{"coercivity_CD", {}};
  DiagnoseMetric aff{"consistency_affine_unconstrained", {}};
  DiagnoseMetric smooth_u{"consistency_bump_unconstrained", {}};
  DiagnoseMetric smooth_c{"consistency_bump_constrained", {}};
  DiagnoseMetric wx{"limit_conformity_uniform_x", {}};
  DiagnoseMetric wg{"limit_conformity_grad_bump", {}};
  DiagnoseMetric wr{"limit_conformity_shear", {}};

  bool cd_converged = true;
  for (const auto &s : setups) {
    const CrDiscretisation &gd = *s.gd;
    const EstimatorResult c = estimate_coercivity(gd);
    cd_converged = cd_converged && c.converged;
    cd.values.push_back(c.value);
    aff.values.push_back(estimate_consistency(gd, affine.w, affine.grad,
                                              false, DofClosure::all_edges));
    smooth_u.values.push_back(
        estimate_consistency(gd, bump.w, bump.grad, false));
    smooth_c.values.push_back(
        estimate_consistency(gd, bump_c.w, bump_c.grad, true));
    wx.values.push_back(estimate_limit_conformity(gd, uniform_x, div_zero));
    wg.values.push_back(
        estimate_limit_conformity(gd, grad_bump, div_grad_bump));
    wr.values.push_back(estimate_limit_conformity(gd, shear, div_shear));
  }
  out.metrics = {cd, aff, smooth_u, smooth_c, wx, wg, wr};

  const auto fail = [&](const std::string &msg) {
    out.pass = false;
    out.gate_messages.push_back(msg);
  };
  if (!cd_converged) {
    fail("coercivity power iteration stagnated on some level");
  }
  {
    const auto [lo, hi] = std::minmax_element(cd.values.begin(),
                                              cd.values.end());
    const double spread = (*hi - *lo) / *lo;
    if (!(spread < 0.20)) {
      fail("coercivity constant varies by " + format_double(spread) +
           " across levels (gate: < 0.2)");
    }
  }
  const auto gate_small = [&](const DiagnoseMetric &m, double bound) {
    for (std::size_t l = 0; l < m.values.size(); ++l) {
      if (!(m.values[l] <= bound)) {
        fail(m.name + " at level " + istr(static_cast<long long>(l)) +
             " is " + format_double(m.values[l]) + " (gate: <= " +
             format_double(bound) + ")");
      }
    }
  };
  const auto gate_decay = [&](const DiagnoseMetric &m, double factor) {
    for (std::size_t l = 1; l < m.values.size(); ++l) {
      if (!(m.values[l - 1] >= factor * m.values[l])) {
        fail(m.name + " decays by only " +
             format_double(m.values[l] > 0.0 ? m.values[l - 1] / m.values[l]
                                             : 0.0) +
             " from level " + istr(static_cast<long long>(l) - 1) + " to " +
             istr(static_cast<long long>(l)) + " (gate: >= " +
             format_double(factor) + ")");
      }
    }
  };
  gate_small(aff, 1e-10);
  gate_decay(smooth_u, 1.5);
  if (amp > 0.0) {
    gate_decay(smooth_c, 1.5);
  } else {
    gate_small(smooth_c, 1e-12);
  }
  gate_small(wx, 1e-10);
  gate_decay(wg, 1.5);
  gate_decay(wr, 1.5);
  return out;
}

OracleOutcome oracle_study(const RunConfig &cfg) {
  LevelSetup s = build_level(cfg, 0);
  const CrDiscretisation &gd = *s.gd;
  if (gd.dof_count() > 15) {
    throw std::invalid_argument(
        "the active-set oracle handles at most 15 unknowns; this mesh has " +
        istr(gd.dof_count()));
  }
  SchemeOperators ops(gd, s.problem);
  const DofVector a0 = interpolate_initial(gd, s.problem.a_ini, true);
  const DofVector b0 = interpolate_initial(gd, s.problem.b_ini, false);
  const double dt = gd.time_grid().dt(0);
  const StepResult step = advance_step(gd, s.problem, ops, a0, b0, dt,
                                       s.options);

  // Rebuild the step's constrained system with the reactions frozen at the
  // converged pair and solve it along both routes.
  const auto &sys = ops.systems_for(dt);
  const Eigen::VectorXd load = assemble_reaction_load(
      gd, s.problem.reactions.f, step.a.values, step.b.values);
  LcpProblem lcp;
  lcp.h = &sys.h_a;
  lcp.q = (ops.mass().array() / sys.dt * a0.values.array()).matrix() + load;
  lcp.upper = gd.obstacle_dofs();

  const Eigen::VectorXd x_enum = solve_active_set(lcp);
  const LcpSolution psor = solve_psor(lcp, step.a.values, s.options.psor);

  OracleOutcome o;
  o.dof_count = gd.dof_count();
  o.discrepancy = (psor.x - x_enum).lpNorm<Eigen::Infinity>();
  o.step_vs_enumeration =
      (step.a.values - x_enum).lpNorm<Eigen::Infinity>();
  o.residual_sign = psor.residual_sign;
  o.residual_complementarity = psor.residual_complementarity;
  return o;
}

// ---------------------------------------------------------------------------
// CLI wrappers

namespace {

fs::path prepare_out_dir(const RunConfig &cfg) {
  fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  write_text_file(dir / "manifest.txt", manifest_text(cfg));
  return dir;
}

} // namespace

int cmd_run(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  RunOutcome o;
  try {
    o = run_single(cfg);
  } catch (const std::invalid_argument &e) {
    err << "configuration rejected: " << e.what() << "\n";
    return 2;
  }
  const fs::path dir = prepare_out_dir(cfg);
  const CrDiscretisation &gd = *o.setup.gd;
  const Trajectory &traj = o.evolution.trajectory;

  write_csv((dir / "residuals.csv").string(),
            residual_table(gd.time_grid(), traj.steps));
  write_snapshots(dir, gd, traj, cfg.vtk_stride);
  write_edge_csv((dir / "edges_final.csv").string(), gd,
                 {{"A", &traj.a.back()}, {"B", &traj.b.back()}});

  if (!o.evolution.converged) {
    write_text_file(dir / "FAILED", "step " + istr(o.evolution.failed_step) +
                                        " did not converge\n");
    err << "solver did not converge at step " << o.evolution.failed_step
        << "; partial artifacts in " << dir.string() << "\n";
    return 3;
  }

  CsvTable energy = energy_table_header();
  append_energy_rows(energy, 0, o.diagnostics);
  write_csv((dir / "energy.csv").string(), energy);

  out << "solved " << gd.time_grid().steps() << " steps on "
      << gd.dof_count() << " unknowns\n";
  out << "delta_A_L2L2 = " << format_double(o.diagnostics.energy.delta_a_l2l2)
      << ", grad_A_LinfL2 = "
      << format_double(o.diagnostics.energy.grad_a_linf_l2)
      << ", B_LinfL2 = " << format_double(o.diagnostics.energy.b_linf_l2)
      << ", grad_B_L2L2 = "
      << format_double(o.diagnostics.energy.grad_b_l2l2) << "\n";
  out << "dual_deltaB_integral = "
      << format_double(o.diagnostics.dual_b_integral) << "\n";
  out << "max residual_sign = "
      << format_double(o.diagnostics.max_residual_sign)
      << ", max residual_complementarity = "
      << format_double(o.diagnostics.max_residual_complementarity) << "\n";
  out << "artifacts in " << dir.string() << "\n";
  return 0;
}

int cmd_converge(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  ConvergeOutcome oc;
  try {
    oc = converge_study(cfg, out);
  } catch (const SolverFailure &e) {
    err << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument &e) {
    err << "configuration rejected: " << e.what() << "\n";
    return 2;
  }
  const fs::path dir = prepare_out_dir(cfg);

  const auto orders = oc.orders();
  const auto order_str = [&](std::size_t row, int k) -> std::string {
    if (row == 0) {
      return "";
    }
    const double v = orders[row - 1][static_cast<std::size_t>(k)];
    return std::isnan(v) ? "" : format_double(v);
  };

  CsvTable table;
  table.header = {"level",
                  "mesh_n",
                  "h (1)",
                  "unknowns",
                  "steps",
                  "err_A_value_LinfL2 (1)",
                  "order_A_value (1)",
                  "err_A_grad_L2L2 (1)",
                  "order_A_grad (1)",
                  "err_B_value_LinfL2 (1)",
                  "order_B_value (1)",
                  "err_B_grad_L2L2 (1)",
                  "order_B_grad (1)",
                  "residual_sign_max (1)",
                  "residual_complementarity_max (1)"};
  for (std::size_t i = 0; i < oc.rows.size(); ++i) {
    const ErrorRow &r = oc.rows[i];
    table.rows.push_back(
        {istr(r.level), istr(r.mesh_n), format_double(r.h), istr(r.dofs),
         istr(r.steps), format_double(r.err_a), order_str(i, 0),
         format_double(r.err_grad_a), order_str(i, 1),
         format_double(r.err_b), order_str(i, 2),
         format_double(r.err_grad_b), order_str(i, 3),
         format_double(r.max_residual_sign),
         format_double(r.max_residual_complementarity)});
  }
  const ErrorRow &r = oc.reference;
  table.rows.push_back({istr(r.level), istr(r.mesh_n), format_double(r.h),
                        istr(r.dofs), istr(r.steps), "", "", "", "", "", "",
                        "", "", format_double(r.max_residual_sign),
                        format_double(r.max_residual_complementarity)});
  write_csv((dir / "converge.csv").string(), table);

  CsvTable energy = energy_table_header();
  for (std::size_t l = 0; l < oc.level_diagnostics.size(); ++l) {
    append_energy_rows(energy, static_cast<int>(l), oc.level_diagnostics[l]);
  }
  write_csv((dir / "energy.csv").string(), energy);

  for (std::size_t l = 0; l < oc.step_reports.size(); ++l) {
    const int steps = (l < oc.rows.size()) ? oc.rows[l].steps
                                           : oc.reference.steps;
    const TimeGrid grid = TimeGrid::uniform(cfg.horizon, steps);
    write_csv((dir / ("residuals_level" + istr(static_cast<long long>(l)) +
                      ".csv"))
                  .string(),
              residual_table(grid, oc.step_reports[l]));
  }

  for (std::size_t i = 0; i < orders.size(); ++i) {
    out << "orders level " << oc.rows[i].level << "->"
        << oc.rows[i + 1].level << ": A value "
        << format_double(orders[i][0]) << ", A grad "
        << format_double(orders[i][1]) << ", B value "
        << format_double(orders[i][2]) << ", B grad "
        << format_double(orders[i][3]) << "\n";
  }
  out << "artifacts in " << dir.string() << "\n";

  if (!oc.monotone) {
    for (const auto &m : oc.gate_messages) {
      err << "gate failure: " << m << "\n";
    }
    return 4;
  }
  out << "all error columns decrease monotonically\n";
  return 0;
}

int cmd_diagnose(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  DiagnoseOutcome oc;
  try {
    oc = diagnose_study(cfg);
  } catch (const std::invalid_argument &e) {
    err << "configuration rejected: " << e.what() << "\n";
    return 2;
  }
  const fs::path dir = prepare_out_dir(cfg);

  CsvTable table;
  table.header = {"metric", "level", "value (1)"};
  for (const auto &m : oc.metrics) {
    for (std::size_t l = 0; l < m.values.size(); ++l) {
      table.rows.push_back(
          {m.name, istr(static_cast<long long>(l)),
           format_double(m.values[l])});
    }
    for (std::size_t l = 1; l < m.values.size(); ++l) {
      table.rows.push_back(
          {m.name + "_ratio", istr(static_cast<long long>(l)),
           format_double(m.values[l] != 0.0
                             ? m.values[l - 1] / m.values[l]
                             : std::numeric_limits<double>::infinity())});
    }
  }
  write_csv((dir / "diagnostics.csv").string(), table);

  for (const auto &m : oc.metrics) {
    out << m.name << ":";
    for (double v : m.values) {
      out << ' ' << format_double(v);
    }
    out << '\n';
  }
  out << "artifacts in " << dir.string() << "\n";

  if (!oc.pass) {
    for (const auto &m : oc.gate_messages) {
      err << "gate failure: " << m << "\n";
    }
    return 4;
  }
  out << "all diagnostic gates hold\n";
  return 0;
}

int cmd_oracle(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  OracleOutcome o;
  try {
    o = oracle_study(cfg);
  } catch (const std::invalid_argument &e) {
    err << "configuration rejected: " << e.what() << "\n";
    return 2;
  }
  const fs::path dir = prepare_out_dir(cfg);

  CsvTable table;
  table.header = {"quantity", "value (1)"};
  table.rows.push_back({"dof_count", istr(o.dof_count)});
  table.rows.push_back({"discrepancy_psor_vs_enumeration",
                        format_double(o.discrepancy)});
  table.rows.push_back({"discrepancy_step_vs_enumeration",
                        format_double(o.step_vs_enumeration)});
  table.rows.push_back({"residual_sign", format_double(o.residual_sign)});
  table.rows.push_back({"residual_complementarity",
                        format_double(o.residual_complementarity)});
  write_csv((dir / "oracle.csv").string(), table);

  out << "unknowns: " << o.dof_count << "\n";
  out << "PSOR vs active-set enumeration: " << format_double(o.discrepancy)
      << "\n";
  out << "damped step vs enumeration: "
      << format_double(o.step_vs_enumeration) << "\n";
  out << "artifacts in " << dir.string() << "\n";
  return 0;
}

} // namespace crvi
