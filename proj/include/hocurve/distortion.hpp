#pragma once

#include "hocurve/common.hpp"
#include "hocurve/mesh.hpp"
#include "hocurve/quadrature.hpp"

namespace hocurve {

/// Rectified determinant: (d + |d|)/2, exactly zero for d <= 0.
double det0(double d);

/// Point-wise distortion of a 3x3 Jacobian,
///   eta = |J|_F^2 / (3 * h(det J)^(2/3)),
/// where h = det0 for delta = 0, or the smoothed rectifier
/// h(d) = (d + sqrt(d^2 + 4 delta^2))/2 for delta > 0. Equals 1 for any
/// scaled rotation and is >= 1 whenever det > 0; returns the kInvalid
/// sentinel when h = 0 (inverted or degenerate point).
double pointwise_eta(const Mat3& J, double delta = 0.0);

/// Cofactor matrix: C.row(i) = A.row(i+1) x A.row(i+2) (indices mod 3), so
/// det A = A.row(i).dot(C.row(i)) and d(det)/dA = C.
Mat3 cofactor(const Mat3& A);

/// Derivative kernels of the squared distortion eta^2 with respect to the
/// Jacobian entries, at a fixed evaluation point. All quantities share the
/// precomputed invariants so gradient, Hessian-vector and diagonal-block
/// evaluations stay consistent.
struct EtaKernel {
  Mat3 A;       // Jacobian
  Mat3 C;       // cofactor(A)
  double s;     // |A|_F^2
  double d;     // det A
  double h;     // rectified det
  double hp;    // h'(d)
  double hpp;   // h''(d)
  bool valid;   // h > 0

  double eta() const;
  double eta2() const;

  /// P = d(eta^2)/dA.
  Mat3 P() const;

  /// Directional derivative of P along dA (the Hessian of eta^2 applied to a
  /// Jacobian perturbation).
  Mat3 dP(const Mat3& dA) const;

  /// 3x3 block mapping a perturbation of row `axis` of A to row `axis` of
  /// dP. The cofactor-derivative term drops out on these diagonal blocks, so
  /// they are symmetric by construction.
  Mat3 diag_block(int axis) const;
};

EtaKernel eta_kernel(const Mat3& J, double delta = 0.0);

struct ElementQuality {
  int element = -1;
  double eta_element = 0.0;    // weighted RMS of eta over the rule
  double shape_quality = 0.0;  // q^S = 1/eta_element, 0 if any point is invalid
  double scaled_jacobian = 0.0;
  double min_det = 0.0;
  double max_det = 0.0;

  bool valid() const { return scaled_jacobian > 0.0; }
};

/// q^S from the given quadrature rule (use a rule finer than the solver's).
ElementQuality element_shape_quality(const HighOrderMesh& mesh, int elem, const QuadratureRule& rule,
                                     double delta = 0.0);

/// q^SJ = min det / |max det| over the documented sample set: the rule's
/// points, the element's own lattice nodes, and the vertices of a uniform
/// reference subdivision of the given level.
double element_scaled_jacobian(const HighOrderMesh& mesh, int elem, const QuadratureRule& rule,
                               int subdivision_level = 4, double* min_det = nullptr,
                               double* max_det = nullptr);

/// Both measures with shared sampling.
ElementQuality element_quality(const HighOrderMesh& mesh, int elem, const QuadratureRule& rule,
                               double delta = 0.0, int subdivision_level = 4);

}  // namespace hocurve
