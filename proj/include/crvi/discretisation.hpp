// Nonconforming P1 discretisation of the unit-square problem.
//
// Degrees of freedom sit on interior edges; boundary edges are eliminated
// (values pinned to zero, never penalized). The basis function attached to
// edge sigma on a cell K is e_K^sigma = 1 - 2*lambda_opp, with lambda_opp the
// barycentric coordinate of the vertex opposite sigma; its gradient is
// cellwise constant. Reconstructions are cellwise: the value operator expands
// the three edge values of a cell, the gradient operator is the constant
// combination of basis gradients.
//
// The barrier enters through per-edge averages chi_sigma computed with the
// 2-point Gauss rule along each edge. Interpolation samples edge midpoints
// and, when requested, clamps to chi_sigma so the interpolant is feasible.

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "crvi/fields.hpp"
#include "crvi/mesh.hpp"

namespace crvi {

/// Strictly increasing time levels starting at 0.
struct TimeGrid {
  std::vector<double> times;

  static TimeGrid uniform(double horizon, int steps);

  int steps() const { return static_cast<int>(times.size()) - 1; }
  double horizon() const { return times.back(); }
  double dt(int n) const { return times[n + 1] - times[n]; }
  double max_step() const;
};

enum class FieldRole {
  generic,
  constrained, // subject to the barrier, kept at or below chi
  free_field,
};

/// Coefficient vector on interior-edge DOFs, in canonical edge order.
struct DofVector {
  Eigen::VectorXd values;
  FieldRole role = FieldRole::generic;
};

class CrDiscretisation {
public:
  /// Builds the DOF map, basis gradients and barrier averages. Rejects a
  /// barrier that is negative at any sample point of a boundary edge (the
  /// feasible set would lose its zero boundary values).
  CrDiscretisation(std::shared_ptr<const Mesh> mesh, TimeGrid grid,
                   const ScalarField &obstacle);

  const Mesh &mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const TimeGrid &time_grid() const { return grid_; }

  int dof_count() const { return dof_count_; }
  /// -1 for boundary edges.
  int dof_of_edge(int edge) const { return dof_of_edge_[edge]; }
  int edge_of_dof(int dof) const { return edge_of_dof_[dof]; }

  /// Barrier averages on interior-edge DOFs.
  const Eigen::VectorXd &obstacle_dofs() const { return chi_dofs_; }
  /// Barrier averages on all edges.
  const Eigen::VectorXd &obstacle_edges() const { return chi_edges_; }

  /// Constant gradients of the three local basis functions of a cell,
  /// ordered like Mesh::cell_edges.
  const std::array<Vec2, 3> &basis_gradients(int cell) const {
    return basis_grads_[cell];
  }

private:
  std::shared_ptr<const Mesh> mesh_;
  TimeGrid grid_;
  int dof_count_ = 0;
  std::vector<int> dof_of_edge_;
  std::vector<int> edge_of_dof_;
  Eigen::VectorXd chi_dofs_;
  Eigen::VectorXd chi_edges_;
  std::vector<std::array<Vec2, 3>> basis_grads_;
};

/// Value of the reconstructed field at x, which must lie in the given cell.
double reconstruct_value(const CrDiscretisation &gd, const DofVector &v,
                         int cell, const Vec2 &x);
/// Cellwise-constant reconstructed gradient.
Vec2 reconstruct_gradient(const CrDiscretisation &gd, const DofVector &v,
                          int cell);

/// Reconstructions from a vector indexed by edge (no boundary elimination).
/// Used by the interpolation tests and the boundary-free estimator space.
double reconstruct_value_edges(const CrDiscretisation &gd,
                               const Eigen::VectorXd &edge_values, int cell,
                               const Vec2 &x);
Vec2 reconstruct_gradient_edges(const CrDiscretisation &gd,
                                const Eigen::VectorXd &edge_values, int cell);

/// Midpoint samples of w on every edge; clamped to the barrier averages when
/// clamp_to_obstacle is set.
Eigen::VectorXd interpolate_edge_midpoints(const CrDiscretisation &gd,
                                           const ScalarField &w,
                                           bool clamp_to_obstacle);
/// Restriction of an all-edge vector to interior DOFs.
DofVector restrict_to_dofs(const CrDiscretisation &gd,
                           const Eigen::VectorXd &edge_values);
/// Interior-DOF interpolant of initial data; clamping tags the result as
/// barrier-constrained.
DofVector interpolate_initial(const CrDiscretisation &gd, const ScalarField &w,
                              bool clamp_to_obstacle);

/// Piecewise-constant-in-time view of a level sequence with the discrete time
/// derivative on each interval.
class SpaceTimeField {
public:
  /// levels.size() must equal time steps + 1; every level must have DOF size.
  SpaceTimeField(const CrDiscretisation &gd, std::vector<DofVector> levels);

  /// Level index whose value the field takes at time t: t in (t_n, t_{n+1}]
  /// maps to n+1, anything at or before t_0 maps to 0.
  int level_for_time(double t) const;
  const DofVector &level(int n) const { return levels_[n]; }
  int level_count() const { return static_cast<int>(levels_.size()); }

  /// (v^{n+1} - v^n) / dt_n, the derivative on interval n.
  DofVector delta(int n) const;

private:
  const CrDiscretisation *gd_;
  std::vector<DofVector> levels_;
};

} // namespace crvi
