#include "crvi/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crvi {

namespace {

void open_or_throw(std::ofstream &out, const std::string &path) {
  out.open(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
}

void flush_or_throw(std::ofstream &out, const std::string &path) {
  out.flush();
  if (!out) {
    throw std::runtime_error("write to '" + path + "' failed");
  }
}

} // namespace

std::string format_double(double v) {
  if (v == 0.0) {
    v = 0.0; // normalise -0
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shortest representation that round-trips, for readable files.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) {
      return shorter;
    }
  }
  return buf;
}

void write_csv(const std::string &path, const CsvTable &table) {
  if (table.header.empty()) {
    throw std::invalid_argument("CSV table must have a header row");
  }
  std::ofstream out;
  open_or_throw(out, path);
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i > 0) {
      out << ',';
    }
    out << table.header[i];
  }
  out << '\n';
  for (const auto &row : table.rows) {
    if (row.size() != table.header.size()) {
      throw std::invalid_argument("CSV row width does not match header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) {
        out << ',';
      }
      out << row[i];
    }
    out << '\n';
  }
  flush_or_throw(out, path);
}

void write_mesh_text(const std::string &path, const Mesh &mesh) {
  std::ofstream out;
  open_or_throw(out, path);
  out << mesh.vertex_count() << ' ' << mesh.cell_count() << ' '
      << mesh.edge_count() << '\n';
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 p = mesh.vertex(v);
    out << format_double(p.x()) << ' ' << format_double(p.y()) << '\n';
  }
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto &cv = mesh.cell(c);
    out << cv[0] << ' ' << cv[1] << ' ' << cv[2] << '\n';
  }
  flush_or_throw(out, path);
}

Mesh read_mesh_text(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "' for reading");
  }
  long long nv = 0;
  long long nc = 0;
  long long ne = 0;
  if (!(in >> nv >> nc >> ne)) {
    throw std::runtime_error(path + ": malformed mesh header");
  }
  if (nv < 3 || nc < 1 || ne < 3) {
    throw std::runtime_error(path + ": implausible mesh counts in header");
  }
  std::vector<Vec2> vertices(static_cast<std::size_t>(nv));
  for (auto &p : vertices) {
    double x = 0.0;
    double y = 0.0;
    if (!(in >> x >> y)) {
      throw std::runtime_error(path + ": truncated vertex list");
    }
    p = Vec2(x, y);
  }
  std::vector<std::array<int, 3>> cells(static_cast<std::size_t>(nc));
  for (auto &cv : cells) {
    if (!(in >> cv[0] >> cv[1] >> cv[2])) {
      throw std::runtime_error(path + ": truncated cell list");
    }
  }
  Mesh mesh = Mesh::from_lists(vertices, cells);
  if (mesh.edge_count() != ne) {
    std::ostringstream msg;
    msg << path << ": header declares " << ne << " edges but the cell list "
        << "induces " << mesh.edge_count();
    throw std::runtime_error(msg.str());
  }
  return mesh;
}

void write_dof_vector_text(const std::string &path, const Eigen::VectorXd &v) {
  std::ofstream out;
  open_or_throw(out, path);
  out << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << format_double(v[i]) << '\n';
  }
  flush_or_throw(out, path);
}

Eigen::VectorXd read_dof_vector_text(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "' for reading");
  }
  long long n = 0;
  if (!(in >> n) || n < 0) {
    throw std::runtime_error(path + ": malformed vector header");
  }
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(in >> v[i])) {
      throw std::runtime_error(path + ": truncated vector data");
    }
  }
  return v;
}

void write_matrix_coo(const std::string &path, const SparseSymMatrix &m) {
  std::ofstream out;
  open_or_throw(out, path);
  out << m.dim() << ' ' << m.dim() << ' ' << m.m.nonZeros() << '\n';
  for (int k = 0; k < m.m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m.m, k); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << format_double(it.value())
          << '\n';
    }
  }
  flush_or_throw(out, path);
}

void write_vtk_snapshot(
    const std::string &path, const Mesh &mesh,
    const std::vector<std::pair<std::string, std::vector<double>>> &cell_data) {
  for (const auto &[name, values] : cell_data) {
    if (static_cast<int>(values.size()) != mesh.cell_count()) {
      throw std::invalid_argument("cell data '" + name +
                                  "' does not match the cell count");
    }
  }
  std::ofstream out;
  open_or_throw(out, path);
  out << "# vtk DataFile Version 2.0\n";
  out << "field snapshot\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertex_count() << " double\n";
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 p = mesh.vertex(v);
    out << format_double(p.x()) << ' ' << format_double(p.y()) << " 0\n";
  }
  out << "CELLS " << mesh.cell_count() << ' ' << 4 * mesh.cell_count() << '\n';
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto &cv = mesh.cell(c);
    out << "3 " << cv[0] << ' ' << cv[1] << ' ' << cv[2] << '\n';
  }
  out << "CELL_TYPES " << mesh.cell_count() << '\n';
  for (int c = 0; c < mesh.cell_count(); ++c) {
    out << "5\n";
  }
  if (!cell_data.empty()) {
    out << "CELL_DATA " << mesh.cell_count() << '\n';
    for (const auto &[name, values] : cell_data) {
      out << "SCALARS " << name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (double v : values) {
        out << format_double(v) << '\n';
      }
    }
  }
  flush_or_throw(out, path);
}

std::vector<double> cell_values(const CrDiscretisation &gd,
                                const DofVector &v) {
  const Mesh &mesh = gd.mesh();
  std::vector<double> out(static_cast<std::size_t>(mesh.cell_count()));
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const Vec2 bc = mesh.cell_barycenter(c);
    out[static_cast<std::size_t>(c)] = reconstruct_value(gd, v, c, bc);
  }
  return out;
}

void write_edge_csv(
    const std::string &path, const CrDiscretisation &gd,
    const std::vector<std::pair<std::string, const DofVector *>> &fields) {
  const Mesh &mesh = gd.mesh();
  CsvTable table;
  table.header = {"edge", "midpoint_x", "midpoint_y", "boundary",
                  "barrier_average"};
  for (const auto &[name, field] : fields) {
    if (field == nullptr ||
        field->values.size() != static_cast<Eigen::Index>(gd.dof_count())) {
      throw std::invalid_argument("edge table field '" + name +
                                  "' has the wrong size");
    }
    table.header.push_back(name);
  }
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const Edge &edge = mesh.edge(e);
    std::vector<std::string> row;
    row.push_back(std::to_string(e));
    row.push_back(format_double(edge.midpoint.x()));
    row.push_back(format_double(edge.midpoint.y()));
    row.push_back(edge.boundary ? "1" : "0");
    row.push_back(format_double(gd.obstacle_edges()[e]));
    const int dof = gd.dof_of_edge(e);
    for (const auto &[name, field] : fields) {
      (void)name;
      row.push_back(format_double(dof >= 0 ? field->values[dof] : 0.0));
    }
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

} // namespace crvi
