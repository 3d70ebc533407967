#pragma once

#include <array>
#include <vector>

#include "hocurve/common.hpp"
#include "hocurve/reference.hpp"

namespace hocurve {

/// Straight-sided tetrahedral input mesh. `boundary` lists the marked
/// surface triangles; every once-shared tet face must appear there exactly
/// once, with a nonnegative mark.
struct LinearMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  struct BFace {
    std::array<int, 3> v;
    int mark = 0;
  };
  std::vector<BFace> boundary;
};

/// Throws InvalidInputError on the first violated invariant: index ranges,
/// positive orientation, watertight marked boundary, nonnegative marks.
void validate(const LinearMesh& mesh);

/// Bounding-box diagonal; the characteristic length all relative tolerances
/// scale with.
double characteristic_length(const LinearMesh& mesh);

/// Degree-q nodal mesh over a fixed straight-sided initial mesh. `nodes`
/// carries the current (possibly curved) coordinates; `initial_vertices`
/// keeps the input vertex coordinates so every Jacobian stays relative to
/// the initial element. Node ids [0, vertex_count) are the linear vertices;
/// shared edge/face nodes appear once (C0 across elements).
struct HighOrderMesh {
  int degree = 1;
  std::vector<Vec3> nodes;
  std::vector<std::vector<int>> elems;  // canonical layout, length C(degree+3,3)
  struct BFace {
    std::vector<int> nodes;  // canonical triangle layout, length C(degree+2,2)
    int mark = 0;
    int adjacent_elem = -1;
  };
  std::vector<BFace> boundary;
  std::vector<Vec3> initial_vertices;
  int vertex_count = 0;
  double ell_c = 0.0;
};

/// Wraps a validated linear mesh as the degree-1 high-order mesh.
HighOrderMesh from_linear(const LinearMesh& mesh);

/// Degree q -> q+1; reproduces the geometric map (new nodes sample the old
/// map on the refined lattice) and glues shared entities to single node ids.
HighOrderMesh elevate_degree(const HighOrderMesh& mesh);

/// Shared immutable reference simplices (degrees 1..4, dims 2..3).
const ReferenceSimplex& shared_reference(int dim, int degree);

/// Jacobian of the current map relative to the initial linear element, so
/// that an uncurved element yields the identity. Throws InvalidInputError
/// if the initial element is degenerate.
Mat3 element_jacobian(const HighOrderMesh& mesh, int elem, const double* bary);

/// Gradient matrix of the initial linear element (columns = edge vectors).
Mat3 initial_jacobian(const HighOrderMesh& mesh, int elem);

/// Point of the current map at a reference location.
Vec3 element_point(const HighOrderMesh& mesh, int elem, const double* bary);
Vec3 face_point(const HighOrderMesh& mesh, const HighOrderMesh::BFace& face, const double* bary);

/// Marks of boundary-face classes. The three lists must be pairwise disjoint
/// and jointly cover every mark present in the mesh they are used with.
struct BoundaryClassification {
  std::vector<int> wall, symmetry, farfield;

  enum class Class { Wall, Symmetry, Farfield };
  Class classify(int mark) const;  // throws LookupError for unknown marks
  void validate_against(const HighOrderMesh& mesh) const;
};

}  // namespace hocurve
