#include "crvi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace crvi {

namespace {

double signed_area(const Vec2 &a, const Vec2 &b, const Vec2 &c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (b.y() - a.y()) * (c.x() - a.x()));
}

} // namespace

Mesh Mesh::from_lists(std::vector<Vec2> vertices,
                      std::vector<std::array<int, 3>> cells) {
  Mesh m;
  const int nv = static_cast<int>(vertices.size());
  const int nc = static_cast<int>(cells.size());
  if (nv < 3 || nc < 1)
    throw std::invalid_argument("mesh needs at least 3 vertices and 1 cell");

  for (int c = 0; c < nc; ++c)
    for (int k = 0; k < 3; ++k)
      if (cells[c][k] < 0 || cells[c][k] >= nv)
        throw std::invalid_argument("cell " + std::to_string(c) +
                                    " references vertex out of range");

  m.vertices_ = std::move(vertices);
  m.cells_ = std::move(cells);

  m.areas_.resize(nc);
  m.total_area_ = 0.0;
  for (int c = 0; c < nc; ++c) {
    const auto &t = m.cells_[c];
    const double s =
        signed_area(m.vertices_[t[0]], m.vertices_[t[1]], m.vertices_[t[2]]);
    if (!(s > 0.0))
      throw std::invalid_argument("cell " + std::to_string(c) +
                                  " is degenerate or clockwise");
    m.areas_[c] = s;
    m.total_area_ += s;
  }

  // Canonical edge table: sorted endpoint pairs in lexicographic order.
  std::map<std::array<int, 2>, int> edge_index;
  for (const auto &t : m.cells_)
    for (int k = 0; k < 3; ++k) {
      int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      if (a > b)
        std::swap(a, b);
      edge_index.emplace(std::array<int, 2>{a, b}, 0);
    }
  {
    int id = 0;
    for (auto &kv : edge_index)
      kv.second = id++;
  }

  m.edges_.resize(edge_index.size());
  for (const auto &kv : edge_index) {
    Edge e;
    e.v = kv.first;
    e.cells = {-1, -1};
    const Vec2 &p = m.vertices_[e.v[0]];
    const Vec2 &q = m.vertices_[e.v[1]];
    e.midpoint = 0.5 * (p + q);
    e.length = (q - p).norm();
    m.edges_[kv.second] = e;
  }

  m.cell_edges_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto &t = m.cells_[c];
    for (int k = 0; k < 3; ++k) {
      int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      if (a > b)
        std::swap(a, b);
      const int e = edge_index.at({a, b});
      m.cell_edges_[c][k] = e;
      Edge &ed = m.edges_[e];
      if (ed.cells[0] == -1)
        ed.cells[0] = c;
      else if (ed.cells[1] == -1)
        ed.cells[1] = c;
      else
        throw std::invalid_argument("edge shared by more than two cells");
    }
  }

  int boundary_edges = 0;
  for (auto &e : m.edges_) {
    e.boundary = (e.cells[1] == -1);
    if (e.boundary)
      ++boundary_edges;
  }
  if (boundary_edges == 0)
    throw std::invalid_argument("mesh has no boundary");

  // Euler relation for a simply connected planar triangulation.
  if (nv - m.edge_count() + nc != 1)
    throw std::invalid_argument("mesh violates V - E + C = 1");

  // Outward normals: for a counter-clockwise cell, rotating the forward
  // tangent of edge k clockwise points outward.
  m.normals_.resize(nc);
  m.diameters_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto &t = m.cells_[c];
    double diam = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Vec2 tang =
          m.vertices_[t[(k + 2) % 3]] - m.vertices_[t[(k + 1) % 3]];
      m.normals_[c][k] = Vec2(tang.y(), -tang.x()) / tang.norm();
      diam = std::max(diam, tang.norm());
    }
    m.diameters_[c] = diam;
  }

  return m;
}

Vec2 Mesh::cell_barycenter(int c) const {
  const auto &t = cells_[c];
  return (vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]]) / 3.0;
}

std::array<double, 3> Mesh::barycentric(int c, const Vec2 &x) const {
  const auto &t = cells_[c];
  const Vec2 &p0 = vertices_[t[0]];
  const Vec2 d1 = vertices_[t[1]] - p0;
  const Vec2 d2 = vertices_[t[2]] - p0;
  const Vec2 dp = x - p0;
  const double det = d1.x() * d2.y() - d1.y() * d2.x();
  const double l1 = (dp.x() * d2.y() - dp.y() * d2.x()) / det;
  const double l2 = (d1.x() * dp.y() - d1.y() * dp.x()) / det;
  return {1.0 - l1 - l2, l1, l2};
}

bool Mesh::contains(int c, const Vec2 &x, double tol) const {
  const auto l = barycentric(c, x);
  return l[0] >= -tol && l[1] >= -tol && l[2] >= -tol;
}

Mesh build_structured_triangulation(int n) {
  if (n < 1)
    throw std::invalid_argument("structured mesh needs n >= 1");
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.emplace_back(double(i) / n, double(j) / n);

  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> cells;
  cells.reserve(2 * static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j);
      const int c = vid(i + 1, j + 1), d = vid(i, j + 1);
      cells.push_back({a, b, c}); // below the lower-left/upper-right diagonal
      cells.push_back({a, c, d}); // above it
    }
  return Mesh::from_lists(std::move(vertices), std::move(cells));
}

Mesh refine_uniform(const Mesh &mesh) {
  std::vector<Vec2> vertices;
  vertices.reserve(mesh.vertex_count() + mesh.edge_count());
  for (int v = 0; v < mesh.vertex_count(); ++v)
    vertices.push_back(mesh.vertex(v));
  // Midpoint vertex of parent edge e gets index vertex_count + e.
  for (int e = 0; e < mesh.edge_count(); ++e)
    vertices.push_back(mesh.edge(e).midpoint);

  const int base = mesh.vertex_count();
  std::vector<std::array<int, 3>> cells;
  cells.reserve(4 * static_cast<size_t>(mesh.cell_count()));
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto &t = mesh.cell(c);
    const auto &ce = mesh.cell_edges(c);
    // m[k] is the midpoint of the edge opposite vertex k.
    const int m0 = base + ce[0], m1 = base + ce[1], m2 = base + ce[2];
    cells.push_back({t[0], m2, m1});
    cells.push_back({m2, t[1], m0});
    cells.push_back({m1, m0, t[2]});
    cells.push_back({m2, m0, m1});
  }
  return Mesh::from_lists(std::move(vertices), std::move(cells));
}

double mesh_size(const Mesh &mesh) {
  double h = 0.0;
  for (int c = 0; c < mesh.cell_count(); ++c)
    h = std::max(h, mesh.cell_diameter(c));
  return h;
}

CellLocator::CellLocator(std::shared_ptr<const Mesh> mesh)
    : mesh_(std::move(mesh)) {
  const Mesh &m = *mesh_;
  lo_ = m.vertex(0);
  hi_ = m.vertex(0);
  for (int v = 1; v < m.vertex_count(); ++v) {
    lo_ = lo_.cwiseMin(m.vertex(v));
    hi_ = hi_.cwiseMax(m.vertex(v));
  }
  bins_ = std::max(1, static_cast<int>(std::floor(
                          std::sqrt(double(m.cell_count()) / 2.0))));
  cells_in_bin_.assign(static_cast<size_t>(bins_) * bins_, {});
  const Vec2 span = (hi_ - lo_).cwiseMax(Vec2(1e-300, 1e-300));
  const auto bin_of = [&](double x, double lo, double sp) {
    int b = static_cast<int>(std::floor((x - lo) / sp * bins_));
    return std::clamp(b, 0, bins_ - 1);
  };
  for (int c = 0; c < m.cell_count(); ++c) {
    Vec2 clo = m.vertex(m.cell(c)[0]), chi = clo;
    for (int k = 1; k < 3; ++k) {
      clo = clo.cwiseMin(m.vertex(m.cell(c)[k]));
      chi = chi.cwiseMax(m.vertex(m.cell(c)[k]));
    }
    const int i0 = bin_of(clo.x(), lo_.x(), span.x());
    const int i1 = bin_of(chi.x(), lo_.x(), span.x());
    const int j0 = bin_of(clo.y(), lo_.y(), span.y());
    const int j1 = bin_of(chi.y(), lo_.y(), span.y());
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        cells_in_bin_[static_cast<size_t>(j) * bins_ + i].push_back(c);
  }
}

int CellLocator::locate(const Vec2 &x, double tol) const {
  const Vec2 span = (hi_ - lo_).cwiseMax(Vec2(1e-300, 1e-300));
  const auto bin_of = [&](double v, double lo, double sp) {
    int b = static_cast<int>(std::floor((v - lo) / sp * bins_));
    return std::clamp(b, 0, bins_ - 1);
  };
  const int i = bin_of(x.x(), lo_.x(), span.x());
  const int j = bin_of(x.y(), lo_.y(), span.y());
  for (int c : cells_in_bin_[static_cast<size_t>(j) * bins_ + i])
    if (mesh_->contains(c, x, tol))
      return c;
  // Points near bin borders can fall in a neighboring bin's cells.
  for (int c = 0; c < mesh_->cell_count(); ++c)
    if (mesh_->contains(c, x, tol))
      return c;
  return -1;
}

} // namespace crvi
