#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "hocurve/common.hpp"

namespace hocurve {

// Entity tables of the reference simplex. Edges and faces are listed in
// lexicographic local-vertex order; this order, together with the node
// layout below, is the file-format node-ordering contract (docs/node-ordering.md).
inline constexpr int kTetEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
inline constexpr int kTetFaces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
inline constexpr int kTriEdges[3][2] = {{0, 1}, {0, 2}, {1, 2}};

/// Nodal Lagrange basis of degree 1..4 on the reference triangle or
/// tetrahedron, with nodes on the equispaced barycentric lattice.
///
/// Node layout: vertex nodes first (local vertex order), then edge nodes
/// (edges in table order, nodes running from the first to the second edge
/// vertex), then face nodes (faces in table order, interior lattice indices
/// (s, t) = weights on the 2nd and 3rd face vertex, s outer and t inner),
/// then interior nodes (lattice weights on vertices 1.. in lexicographic
/// order). Gradients are taken with respect to the reference Cartesian
/// coordinates x_k = bary[k+1]; vertex 0 sits at the origin.
struct ReferenceSimplex {
  int dim = 0;
  int degree = 0;
  int node_count = 0;
  std::vector<std::array<int, 4>> multi_index;  // per node; entries sum to degree
  Eigen::MatrixXd nodes_bary;                   // node_count x (dim+1)

  // N_j(x) = sum_k coeff(k, j) * x^monomials[k]
  Eigen::MatrixXd coeff;
  std::vector<std::array<int, 3>> monomials;

  /// values: node_count entries. grads (optional): node_count x dim row-major.
  void eval(const double* bary, double* values, double* grads) const;

  Eigen::VectorXd values_at(const double* bary) const;
};

/// Throws UnsupportedDegreeError outside degree 1..4, InvalidInputError for
/// dim not in {2, 3}.
ReferenceSimplex build_reference(int dim, int degree);

/// Basis values and gradients tabulated at a fixed point set (hot loops).
struct TabulatedBasis {
  Eigen::MatrixXd N;                       // npts x node_count
  std::array<Eigen::MatrixXd, 3> dN;       // per reference direction (dim used)
};
TabulatedBasis tabulate_basis(const ReferenceSimplex& ref, const Eigen::MatrixXd& pts_bary);

/// Principal-lattice subdivision of the reference simplex: n^dim positively
/// oriented sub-simplices on the (dim+1)-point-per-edge... lattice of step 1/n.
struct SubdivisionGrid {
  Eigen::MatrixXd points_bary;          // npts x (dim+1)
  std::vector<std::array<int, 4>> cells;  // dim+1 entries used per cell
};
SubdivisionGrid subdivide_reference(int dim, int n);

/// All barycentric lattice points of step 1/n (no cells), npts x (dim+1).
Eigen::MatrixXd lattice_points(int dim, int n);

}  // namespace hocurve
