#include "crvi/assembly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace crvi {

int closure_size(const CrDiscretisation &gd, DofClosure closure) {
  return closure == DofClosure::interior ? gd.dof_count()
                                         : gd.mesh().edge_count();
}

namespace {

int index_of(const CrDiscretisation &gd, DofClosure closure, int edge) {
  return closure == DofClosure::interior ? gd.dof_of_edge(edge) : edge;
}

void check_tensor_sample(const Eigen::Matrix2d &d, const TensorField &field,
                         int cell) {
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  if (std::abs(d(0, 1) - d(1, 0)) > 1e-12 * scale)
    throw std::invalid_argument("diffusion tensor not symmetric at cell " +
                                std::to_string(cell));
  const double tr2 = 0.5 * (d(0, 0) + d(1, 1));
  const double disc = std::sqrt(std::max(
      0.0, 0.25 * (d(0, 0) - d(1, 1)) * (d(0, 0) - d(1, 1)) +
               d(0, 1) * d(1, 0)));
  const double lo = tr2 - disc, hi = tr2 + disc;
  const double slack = 1e-9 * std::max(1.0, field.upper);
  if (lo < field.lower - slack || hi > field.upper + slack)
    throw std::invalid_argument(
        "diffusion tensor eigenvalue outside declared bounds at cell " +
        std::to_string(cell));
}

} // namespace

Eigen::VectorXd mass_diagonal(const CrDiscretisation &gd, DofClosure closure) {
  const Mesh &m = gd.mesh();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(closure_size(gd, closure));
  for (int c = 0; c < m.cell_count(); ++c) {
    const double w = m.cell_area(c) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const int i = index_of(gd, closure, m.cell_edges(c)[k]);
      if (i >= 0)
        diag[i] += w;
    }
  }
  return diag;
}

SparseSymMatrix assemble_mass(const CrDiscretisation &gd, DofClosure closure) {
  const Eigen::VectorXd diag = mass_diagonal(gd, closure);
  SparseSymMatrix out;
  out.m.resize(diag.size(), diag.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(diag.size());
  for (int i = 0; i < diag.size(); ++i)
    trips.emplace_back(i, i, diag[i]);
  out.m.setFromTriplets(trips.begin(), trips.end());
  out.m.makeCompressed();
  return out;
}

SparseSymMatrix assemble_stiffness(const CrDiscretisation &gd,
                                   const TensorField &diffusion,
                                   DofClosure closure) {
  const Mesh &m = gd.mesh();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * static_cast<size_t>(m.cell_count()));
  for (int c = 0; c < m.cell_count(); ++c) {
    const Vec2 bc = m.cell_barycenter(c);
    const Eigen::Matrix2d d = diffusion.value(bc.x(), bc.y());
    check_tensor_sample(d, diffusion, c);
    const auto &grads = gd.basis_gradients(c);
    const double area = m.cell_area(c);
    std::array<Vec2, 3> dg;
    for (int k = 0; k < 3; ++k)
      dg[k] = d * grads[k];
    for (int k = 0; k < 3; ++k) {
      const int i = index_of(gd, closure, m.cell_edges(c)[k]);
      if (i < 0)
        continue;
      for (int l = 0; l < 3; ++l) {
        const int j = index_of(gd, closure, m.cell_edges(c)[l]);
        if (j < 0)
          continue;
        trips.emplace_back(i, j, area * dg[k].dot(grads[l]));
      }
    }
  }
  SparseSymMatrix out;
  const int n = closure_size(gd, closure);
  out.m.resize(n, n);
  out.m.setFromTriplets(trips.begin(), trips.end());
  out.m.makeCompressed();
  return out;
}

Eigen::VectorXd
assemble_reaction_load(const CrDiscretisation &gd,
                       const std::function<double(double, double)> &f,
                       const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  if (a.size() != gd.dof_count() || b.size() != gd.dof_count())
    throw std::invalid_argument("reaction load needs DOF-sized arguments");
  const Eigen::VectorXd diag = mass_diagonal(gd, DofClosure::interior);
  Eigen::VectorXd load(gd.dof_count());
  for (int i = 0; i < gd.dof_count(); ++i)
    load[i] = diag[i] * f(a[i], b[i]);
  return load;
}

} // namespace crvi
