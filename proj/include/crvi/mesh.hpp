// Conforming triangulations of polygonal domains, oriented toward the unit
// square. A Mesh is immutable after construction: every constructor path runs
// the full validation (positive cell areas, manifold edge adjacency, Euler
// relation V - E + C = 1) and derived data (edges, normals, areas, diameters)
// is computed once.
//
// Edge identity is canonical: an edge is the sorted pair (lo, hi) of its
// endpoint vertex indices, and edges are numbered in lexicographic order of
// those pairs. Downstream DOF numbering inherits this order, which keeps runs
// bit-stable across identical inputs.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

namespace crvi {

using Vec2 = Eigen::Vector2d;

struct Edge {
  std::array<int, 2> v;     // endpoint vertex indices, v[0] < v[1]
  std::array<int, 2> cells; // adjacent cells; cells[1] == -1 on the boundary
  Vec2 midpoint;
  double length = 0.0;
  bool boundary = false;
};

class Mesh {
public:
  /// Builds from raw vertex/cell lists. Cells must be counter-clockwise
  /// vertex triples. Throws std::invalid_argument on any invariant violation.
  static Mesh from_lists(std::vector<Vec2> vertices,
                         std::vector<std::array<int, 3>> cells);

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int cell_count() const { return static_cast<int>(cells_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const Vec2 &vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3> &cell(int c) const { return cells_[c]; }
  const Edge &edge(int e) const { return edges_[e]; }
  const std::vector<Edge> &edges() const { return edges_; }

  /// Local edge k of a cell is the edge opposite local vertex k.
  const std::array<int, 3> &cell_edges(int c) const { return cell_edges_[c]; }
  /// Outward unit normal of local edge k of cell c.
  const Vec2 &outward_normal(int c, int k) const { return normals_[c][k]; }

  double cell_area(int c) const { return areas_[c]; }
  double cell_diameter(int c) const { return diameters_[c]; }
  Vec2 cell_barycenter(int c) const;
  double total_area() const { return total_area_; }

  /// Barycentric coordinates of x with respect to cell c (they sum to 1).
  std::array<double, 3> barycentric(int c, const Vec2 &x) const;
  /// True when x lies in the closed cell, up to the given slack on the
  /// normalized barycentric coordinates.
  bool contains(int c, const Vec2 &x, double tol = 1e-12) const;

private:
  Mesh() = default;

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> cell_edges_;
  std::vector<std::array<Vec2, 3>> normals_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  double total_area_ = 0.0;
};

/// Structured triangulation of the unit square: n x n squares, each split by
/// the diagonal from its lower-left to its upper-right corner. Throws for
/// n < 1. Counts: (n+1)^2 vertices, 2n^2 cells, 3n^2 + 2n edges.
Mesh build_structured_triangulation(int n);

/// One uniform (red) refinement: every cell is split into four similar
/// children through its edge midpoints. Vertex numbering keeps the parent
/// vertices first, then one midpoint per parent edge in canonical edge order.
Mesh refine_uniform(const Mesh &mesh);

/// Largest cell diameter.
double mesh_size(const Mesh &mesh);

/// Point-location accelerator: a uniform bin grid over the mesh bounding box.
/// Queries are deterministic; ties on shared edges resolve to the lowest cell
/// index that contains the point within tolerance.
class CellLocator {
public:
  explicit CellLocator(std::shared_ptr<const Mesh> mesh);

  /// Index of a cell containing x, or -1 if none does (within tol).
  int locate(const Vec2 &x, double tol = 1e-12) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  int bins_;
  Vec2 lo_, hi_;
  std::vector<std::vector<int>> cells_in_bin_;
};

} // namespace crvi
