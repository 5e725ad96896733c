// Operator assembly with the 3-point edge-midpoint rule.
//
// With that rule the mass matrix is exactly diagonal (the rule is exact for
// the quadratic basis products, and the basis is a Lagrange basis of the
// midpoints), with entries sum of |K|/3 over the cells around an edge. The
// stiffness matrix samples the diffusion tensor at cell barycenters; the
// reaction load evaluates the nonlinearity at the DOF values and weighs it
// with the mass diagonal.
//
// Assembly loops cells in index order. The result is independent of the
// visitation order up to floating-point reassociation (the tests pin 1e-13).

#pragma once

#include <Eigen/Sparse>
#include <functional>

#include "crvi/discretisation.hpp"
#include "crvi/fields.hpp"

namespace crvi {

/// Which edge set carries unknowns: the interior (homogeneous boundary
/// elimination, the scheme's space) or all edges (reproduction checks and the
/// boundary-free estimator space).
enum class DofClosure { interior, all_edges };

/// Symmetric sparse operator, full (both-triangle) storage.
struct SparseSymMatrix {
  Eigen::SparseMatrix<double> m;
  int dim() const { return static_cast<int>(m.rows()); }
};

int closure_size(const CrDiscretisation &gd, DofClosure closure);

/// Lumped-free diagonal of the mass operator: entry sum of |K|/3.
Eigen::VectorXd mass_diagonal(const CrDiscretisation &gd,
                              DofClosure closure = DofClosure::interior);

/// Diagonal mass matrix (see mass_diagonal).
SparseSymMatrix assemble_mass(const CrDiscretisation &gd,
                              DofClosure closure = DofClosure::interior);

/// Stiffness with tensor D sampled at barycenters. Throws when a sample is
/// not symmetric or has an eigenvalue outside [D.lower, D.upper].
SparseSymMatrix assemble_stiffness(const CrDiscretisation &gd,
                                   const TensorField &diffusion,
                                   DofClosure closure = DofClosure::interior);

/// Load vector of the reaction term: entry mass_diagonal * f(a, b) at the
/// edge's DOF values. Linear in f pointwise.
Eigen::VectorXd
assemble_reaction_load(const CrDiscretisation &gd,
                       const std::function<double(double, double)> &f,
                       const Eigen::VectorXd &a, const Eigen::VectorXd &b);

} // namespace crvi
