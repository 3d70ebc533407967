#pragma once

#include <Eigen/Dense>

#include "hocurve/common.hpp"

namespace hocurve {

/// Quadrature rule on the reference triangle (dim 2) or tetrahedron (dim 3),
/// in barycentric coordinates. Weights are positive and sum to the reference
/// measure (1/2 triangle, 1/6 tetrahedron).
struct QuadratureRule {
  int dim = 0;
  int exactness = 0;  // every polynomial of this total degree integrates exactly
  Eigen::MatrixXd points_bary;  // npts x (dim+1)
  Eigen::VectorXd weights;      // npts
};

/// Exactness 1 and 2 use the classic centroid / symmetric rules; higher
/// degrees fall back to a conical-product (collapsed-coordinate Gauss-Jacobi)
/// rule, constructible for any degree with positive weights.
QuadratureRule quadrature(int dim, int exactness);

/// n-point Gauss-Jacobi rule on [0,1] with weight (1-t)^alpha: nodes
/// ascending, weights positive, exact for polynomials of degree <= 2n-1.
void gauss_jacobi(int n, int alpha, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace hocurve
