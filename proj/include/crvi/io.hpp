// Text artifacts: CSV tables, VTK legacy snapshots, the plain mesh format,
// DOF vectors and sparse operators. All numbers go through format_double
// (shortest round-trip via %.17g) so identical runs produce byte-identical
// files.
//
// Mesh text format: header "V C E", then V lines "x y", then C lines
// "i j k" (counter-clockwise vertex triples). Edges are rebuilt canonically
// on load and the count is checked against the header.

#pragma once

#include <string>
#include <vector>

#include "crvi/assembly.hpp"
#include "crvi/discretisation.hpp"
#include "crvi/mesh.hpp"

namespace crvi {

std::string format_double(double v);

/// One CSV table; the header row must name quantity and units.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string &path, const CsvTable &table);

void write_mesh_text(const std::string &path, const Mesh &mesh);
Mesh read_mesh_text(const std::string &path);

void write_dof_vector_text(const std::string &path, const Eigen::VectorXd &v);
Eigen::VectorXd read_dof_vector_text(const std::string &path);

/// "row col value" per stored entry, outer order.
void write_matrix_coo(const std::string &path, const SparseSymMatrix &m);

/// Legacy ASCII unstructured-grid snapshot with one barycenter value per
/// cell and field.
void write_vtk_snapshot(
    const std::string &path, const Mesh &mesh,
    const std::vector<std::pair<std::string, std::vector<double>>> &cell_data);

/// Per-cell barycenter values of a reconstructed field.
std::vector<double> cell_values(const CrDiscretisation &gd,
                                const DofVector &v);

/// Sidecar table of per-edge data: midpoint, boundary flag, barrier average
/// and the DOF values of the given fields (zero on boundary edges).
void write_edge_csv(
    const std::string &path, const CrDiscretisation &gd,
    const std::vector<std::pair<std::string, const DofVector *>> &fields);

} // namespace crvi
