#include <fstream>
#include <vector>

#include "hocurve/distortion.hpp"
#include "hocurve/io.hpp"
#include "hocurve/solver.hpp"

namespace hocurve {

// Linear sub-tet sampling of the high-order map. Points are written per
// element (no deduplication across elements; viewers merge coincident
// points if asked to). Cell data: parent qS, qSJ and element id.
void write_visualization(const HighOrderMesh& mesh, int subdivision_level,
                         const std::string& path) {
  if (subdivision_level < 1) throw InvalidInputError("subdivision level must be >= 1");
  const SubdivisionGrid grid = subdivide_reference(3, subdivision_level);
  const ReferenceSimplex& ref = shared_reference(3, mesh.degree);
  const int npts = static_cast<int>(grid.points_bary.rows());
  const TabulatedBasis basis = tabulate_basis(ref, grid.points_bary);

  const std::size_t ne = mesh.elems.size();
  const QuadratureRule rule = quadrature(3, solver_exactness(mesh.degree) + 4);
  std::vector<double> qs(ne), qsj(ne);
  std::vector<Eigen::MatrixXd> coords(ne);
  parallel_for(ne, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const ElementQuality eq = element_quality(mesh, static_cast<int>(i), rule);
      qs[i] = eq.shape_quality;
      qsj[i] = eq.scaled_jacobian;
      Eigen::MatrixXd X(ref.node_count, 3);
      for (int a = 0; a < ref.node_count; ++a) X.row(a) = mesh.nodes[mesh.elems[i][a]].transpose();
      coords[i] = basis.N * X;  // npts x 3 sample of the element map
    }
  });

  const std::size_t cells_per_elem = grid.cells.size();
  const std::size_t total_pts = ne * static_cast<std::size_t>(npts);
  const std::size_t total_cells = ne * cells_per_elem;

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "<?xml version=\"1.0\"?>\n"
      << "<VTKFile type=\"UnstructuredGrid\" version=\"0.1\" byte_order=\"LittleEndian\">\n"
      << "<UnstructuredGrid>\n"
      << "<Piece NumberOfPoints=\"" << total_pts << "\" NumberOfCells=\"" << total_cells << "\">\n";

  out << "<Points>\n<DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n";
  for (std::size_t e = 0; e < ne; ++e)
    for (int i = 0; i < npts; ++i)
      out << format_double(coords[e](i, 0)) << " " << format_double(coords[e](i, 1)) << " "
          << format_double(coords[e](i, 2)) << "\n";
  out << "</DataArray>\n</Points>\n";

  out << "<Cells>\n<DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n";
  for (std::size_t e = 0; e < ne; ++e) {
    const std::size_t base = e * static_cast<std::size_t>(npts);
    for (const auto& cell : grid.cells)
      out << base + cell[0] << " " << base + cell[1] << " " << base + cell[2] << " "
          << base + cell[3] << "\n";
  }
  out << "</DataArray>\n<DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n";
  for (std::size_t c = 1; c <= total_cells; ++c) out << 4 * c << "\n";
  out << "</DataArray>\n<DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n";
  for (std::size_t c = 0; c < total_cells; ++c) out << 10 << "\n";  // VTK tetrahedron
  out << "</DataArray>\n</Cells>\n";

  out << "<CellData Scalars=\"qS\">\n";
  out << "<DataArray type=\"Float64\" Name=\"qS\" format=\"ascii\">\n";
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t c = 0; c < cells_per_elem; ++c) out << format_double(qs[e]) << "\n";
  out << "</DataArray>\n<DataArray type=\"Float64\" Name=\"qSJ\" format=\"ascii\">\n";
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t c = 0; c < cells_per_elem; ++c) out << format_double(qsj[e]) << "\n";
  out << "</DataArray>\n<DataArray type=\"Int64\" Name=\"element\" format=\"ascii\">\n";
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t c = 0; c < cells_per_elem; ++c) out << e << "\n";
  out << "</DataArray>\n</CellData>\n";

  out << "</Piece>\n</UnstructuredGrid>\n</VTKFile>\n";
  if (!out) throw Error("write failed for " + path);
}

}  // namespace hocurve
