#pragma once

#include <string>

#include "hocurve/geometry.hpp"
#include "hocurve/mesh.hpp"

namespace hocurve {

/// Reads an ASCII MSH file (version 4.1 or 2.2) containing a straight-sided
/// tet mesh with marked boundary triangles. Physical-group tags become marks;
/// in 4.1 files the enclosing entity's first physical tag is used, falling
/// back to the entity tag when no physical group is attached. Point and line
/// elements are ignored; any other non-tet, non-triangle element is an
/// error. All structural problems throw ParseError with the offending line.
LinearMesh read_linear_mesh(const std::string& path);

/// Reads a (possibly high-order) ASCII MSH 4.1 file, degrees 1 to 4. The
/// straight reference configuration is taken from the corner nodes as read,
/// so qualities measured on the result are relative to its own underlying
/// linear mesh. Node ordering per docs/node-ordering.md.
HighOrderMesh read_curved_mesh(const std::string& path);

/// Writes MSH 4.1 ASCII. Coordinates are printed with 17 significant digits,
/// so read_curved_mesh(write_curved_mesh(m)) reproduces them bitwise. Each
/// boundary mark becomes a surface entity carrying a physical group named
/// "mark_<m>"; when a classification is given, three additional groups named
/// "wall", "symmetry" and "farfield" are attached to the corresponding
/// entities. Throws Error on I/O failure, UnsupportedDegreeError above 4.
void write_curved_mesh(const HighOrderMesh& mesh, const std::string& path,
                       const BoundaryClassification* classification = nullptr);

/// Geometry model serialization (JSON document with virtual_surfaces,
/// virtual_curves, mark_to_surface, fixed_vertices).
GeometryModel read_geometry(const std::string& path);
void write_geometry(const GeometryModel& model, const std::string& path);

/// Boundary classification: {"wall": [...], "symmetry": [...], "farfield": [...]}.
BoundaryClassification read_classification(const std::string& path);
void write_classification(const BoundaryClassification& cls, const std::string& path);

/// Writes an unstructured-grid XML (.vtu) visualization: every element is
/// sampled on the uniform lattice of the given subdivision level and emitted
/// as level^3 linear sub-tets, with the parent element's shape quality (qS),
/// scaled Jacobian (qSJ) and id attached as cell data.
void write_visualization(const HighOrderMesh& mesh, int subdivision_level,
                         const std::string& path);

}  // namespace hocurve
