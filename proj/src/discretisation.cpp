#include "crvi/discretisation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "crvi/quadrature.hpp"

namespace crvi {

TimeGrid TimeGrid::uniform(double horizon, int steps) {
  if (!(horizon > 0.0) || steps < 1)
    throw std::invalid_argument("time grid needs horizon > 0 and steps >= 1");
  TimeGrid g;
  g.times.resize(steps + 1);
  for (int k = 0; k <= steps; ++k)
    g.times[k] = horizon * k / steps;
  g.times[steps] = horizon;
  for (int k = 0; k < steps; ++k)
    if (!(g.times[k + 1] > g.times[k]))
      throw std::invalid_argument("time grid is not strictly increasing");
  return g;
}

double TimeGrid::max_step() const {
  double m = 0.0;
  for (int n = 0; n < steps(); ++n)
    m = std::max(m, dt(n));
  return m;
}

CrDiscretisation::CrDiscretisation(std::shared_ptr<const Mesh> mesh,
                                   TimeGrid grid, const ScalarField &obstacle)
    : mesh_(std::move(mesh)), grid_(std::move(grid)) {
  const Mesh &m = *mesh_;
  if (grid_.times.size() < 2 || grid_.times.front() != 0.0)
    throw std::invalid_argument("time grid must start at 0 with >= 1 step");

  dof_of_edge_.assign(m.edge_count(), -1);
  for (int e = 0; e < m.edge_count(); ++e)
    if (!m.edge(e).boundary) {
      dof_of_edge_[e] = dof_count_++;
      edge_of_dof_.push_back(e);
    }

  chi_edges_.resize(m.edge_count());
  for (int e = 0; e < m.edge_count(); ++e) {
    const Edge &ed = m.edge(e);
    const Vec2 &p = m.vertex(ed.v[0]);
    const Vec2 &q = m.vertex(ed.v[1]);
    double avg = 0.0;
    bool negative = false;
    for (double s : quad::edge_gauss_points) {
      const Vec2 g = p + s * (q - p);
      const double val = obstacle(g.x(), g.y());
      avg += 0.5 * val;
      negative = negative || val < 0.0;
    }
    if (ed.boundary) {
      const Vec2 &mid = ed.midpoint;
      if (negative || obstacle(mid.x(), mid.y()) < 0.0)
        throw std::invalid_argument(
            "obstacle is negative on boundary edge " + std::to_string(e) +
            "; zero boundary values would be infeasible");
    }
    chi_edges_[e] = avg;
  }
  chi_dofs_.resize(dof_count_);
  for (int k = 0; k < dof_count_; ++k)
    chi_dofs_[k] = chi_edges_[edge_of_dof_[k]];

  basis_grads_.resize(m.cell_count());
  for (int c = 0; c < m.cell_count(); ++c) {
    const auto &t = m.cell(c);
    const double area = m.cell_area(c);
    for (int k = 0; k < 3; ++k) {
      // grad e_k = -2 grad lambda_k; for a CCW cell this is the rotated
      // opposite-edge vector over the area.
      const Vec2 tang = m.vertex(t[(k + 2) % 3]) - m.vertex(t[(k + 1) % 3]);
      basis_grads_[c][k] = Vec2(tang.y(), -tang.x()) / area;
    }
  }
}

namespace {

double value_from_local(const Mesh &mesh, int cell,
                        const std::array<double, 3> &edge_vals, const Vec2 &x) {
  const auto l = mesh.barycentric(cell, x);
  if (l[0] < -1e-10 || l[1] < -1e-10 || l[2] < -1e-10)
    throw std::invalid_argument("reconstruction point lies outside the cell");
  double v = 0.0;
  for (int k = 0; k < 3; ++k)
    v += edge_vals[k] * (1.0 - 2.0 * l[k]);
  return v;
}

} // namespace

double reconstruct_value(const CrDiscretisation &gd, const DofVector &v,
                         int cell, const Vec2 &x) {
  const auto &ce = gd.mesh().cell_edges(cell);
  std::array<double, 3> loc{};
  for (int k = 0; k < 3; ++k) {
    const int d = gd.dof_of_edge(ce[k]);
    loc[k] = d >= 0 ? v.values[d] : 0.0;
  }
  return value_from_local(gd.mesh(), cell, loc, x);
}

Vec2 reconstruct_gradient(const CrDiscretisation &gd, const DofVector &v,
                          int cell) {
  const auto &ce = gd.mesh().cell_edges(cell);
  const auto &grads = gd.basis_gradients(cell);
  Vec2 g = Vec2::Zero();
  for (int k = 0; k < 3; ++k) {
    const int d = gd.dof_of_edge(ce[k]);
    if (d >= 0)
      g += v.values[d] * grads[k];
  }
  return g;
}

double reconstruct_value_edges(const CrDiscretisation &gd,
                               const Eigen::VectorXd &edge_values, int cell,
                               const Vec2 &x) {
  const auto &ce = gd.mesh().cell_edges(cell);
  return value_from_local(
      gd.mesh(), cell,
      {edge_values[ce[0]], edge_values[ce[1]], edge_values[ce[2]]}, x);
}

Vec2 reconstruct_gradient_edges(const CrDiscretisation &gd,
                                const Eigen::VectorXd &edge_values, int cell) {
  const auto &ce = gd.mesh().cell_edges(cell);
  const auto &grads = gd.basis_gradients(cell);
  Vec2 g = Vec2::Zero();
  for (int k = 0; k < 3; ++k)
    g += edge_values[ce[k]] * grads[k];
  return g;
}

Eigen::VectorXd interpolate_edge_midpoints(const CrDiscretisation &gd,
                                           const ScalarField &w,
                                           bool clamp_to_obstacle) {
  const Mesh &m = gd.mesh();
  Eigen::VectorXd z(m.edge_count());
  for (int e = 0; e < m.edge_count(); ++e) {
    const Vec2 &mid = m.edge(e).midpoint;
    double v = w(mid.x(), mid.y());
    if (clamp_to_obstacle)
      v = std::min(v, gd.obstacle_edges()[e]);
    z[e] = v;
  }
  return z;
}

DofVector restrict_to_dofs(const CrDiscretisation &gd,
                           const Eigen::VectorXd &edge_values) {
  DofVector v;
  v.values.resize(gd.dof_count());
  for (int k = 0; k < gd.dof_count(); ++k)
    v.values[k] = edge_values[gd.edge_of_dof(k)];
  return v;
}

DofVector interpolate_initial(const CrDiscretisation &gd, const ScalarField &w,
                              bool clamp_to_obstacle) {
  DofVector v = restrict_to_dofs(gd, interpolate_edge_midpoints(
                                         gd, w, clamp_to_obstacle));
  v.role = clamp_to_obstacle ? FieldRole::constrained : FieldRole::free_field;
  return v;
}

SpaceTimeField::SpaceTimeField(const CrDiscretisation &gd,
                               std::vector<DofVector> levels)
    : gd_(&gd), levels_(std::move(levels)) {
  if (static_cast<int>(levels_.size()) != gd.time_grid().steps() + 1)
    throw std::invalid_argument(
        "level count does not match the time grid (need steps + 1)");
  for (const auto &l : levels_)
    if (l.values.size() != gd.dof_count())
      throw std::invalid_argument("level has wrong DOF dimension");
}

int SpaceTimeField::level_for_time(double t) const {
  const auto &times = gd_->time_grid().times;
  if (t <= times.front())
    return 0;
  if (t > times.back())
    throw std::invalid_argument("time beyond the grid horizon");
  for (int k = 1; k < static_cast<int>(times.size()); ++k)
    if (t <= times[k])
      return k;
  return gd_->time_grid().steps();
}

DofVector SpaceTimeField::delta(int n) const {
  DofVector d;
  d.values = (levels_[n + 1].values - levels_[n].values) /
             gd_->time_grid().dt(n);
  return d;
}

} // namespace crvi
