#include "hocurve/distortion.hpp"

#include <cmath>

#include "hocurve/reference.hpp"

namespace hocurve {

double det0(double d) { return d > 0 ? d : 0.0; }

Mat3 cofactor(const Mat3& A) {
  Mat3 C;
  for (int i = 0; i < 3; ++i) {
    Vec3 u = A.row((i + 1) % 3), v = A.row((i + 2) % 3);
    C.row(i) = u.cross(v).transpose();
  }
  return C;
}

EtaKernel eta_kernel(const Mat3& J, double delta) {
  EtaKernel k;
  k.A = J;
  k.C = cofactor(J);
  k.s = J.squaredNorm();
  k.d = J.determinant();
  if (delta > 0) {
    double q = std::sqrt(k.d * k.d + 4 * delta * delta);
    k.h = 0.5 * (k.d + q);
    k.hp = 0.5 * (1 + k.d / q);
    k.hpp = 2 * delta * delta / (q * q * q);
    k.valid = true;
  } else {
    k.h = det0(k.d);
    k.hp = 1.0;
    k.hpp = 0.0;
    k.valid = k.d > 0;
  }
  return k;
}

double EtaKernel::eta() const {
  if (!valid || h <= 0) return kInvalid;
  double c = std::cbrt(h);
  return s / (3 * c * c);
}

double EtaKernel::eta2() const {
  double e = eta();
  return is_invalid(e) ? kInvalid : e * e;
}

Mat3 EtaKernel::P() const {
  double c = std::cbrt(h);
  double h43 = h * c, h73 = h * h * c;
  return (4.0 / 9.0) * s / h43 * A - (4.0 / 27.0) * s * s / h73 * hp * C;
}

Mat3 EtaKernel::dP(const Mat3& dA) const {
  double c = std::cbrt(h);
  double h43 = h * c, h73 = h * h * c, h103 = h * h * h * c;
  double ds = 2 * A.cwiseProduct(dA).sum();
  double dd = C.cwiseProduct(dA).sum();
  // adjugate directional derivative via the Cayley-Hamilton expansion
  Mat3 dAdj = dA * A + A * dA - dA.trace() * A - A.trace() * dA +
              (A.trace() * dA.trace() - (A * dA).trace()) * Mat3::Identity();
  Mat3 dC = dAdj.transpose();

  double alpha = (4.0 / 9.0) * s / h43;
  double beta = (4.0 / 27.0) * s * s / h73 * hp;
  double dalpha = (4.0 / 9.0) * ds / h43 - (16.0 / 27.0) * s / h73 * hp * dd;
  double dbeta = (8.0 / 27.0) * s / h73 * hp * ds - (28.0 / 81.0) * s * s / h103 * hp * hp * dd +
                 (4.0 / 27.0) * s * s / h73 * hpp * dd;
  return dalpha * A + alpha * dA - dbeta * C - beta * dC;
}

Mat3 EtaKernel::diag_block(int axis) const {
  double c = std::cbrt(h);
  double h43 = h * c, h73 = h * h * c, h103 = h * h * h * c;
  Vec3 a = A.row(axis).transpose(), r = C.row(axis).transpose();
  Mat3 M = (8.0 / 9.0) / h43 * (a * a.transpose());
  M += (4.0 / 9.0) * s / h43 * Mat3::Identity();
  M -= (16.0 / 27.0) * s / h73 * hp * (a * r.transpose() + r * a.transpose());
  M += ((28.0 / 81.0) * s * s / h103 * hp * hp - (4.0 / 27.0) * s * s / h73 * hpp) *
       (r * r.transpose());
  return M;
}

double pointwise_eta(const Mat3& J, double delta) { return eta_kernel(J, delta).eta(); }

ElementQuality element_shape_quality(const HighOrderMesh& mesh, int elem, const QuadratureRule& rule,
                                     double delta) {
  ElementQuality q;
  q.element = elem;
  double wsum = 0, acc = 0;
  bool poisoned = false;
  q.min_det = std::numeric_limits<double>::infinity();
  q.max_det = -q.min_det;
  for (int i = 0; i < static_cast<int>(rule.points_bary.rows()); ++i) {
    Eigen::Vector4d b = rule.points_bary.row(i).transpose();
    Mat3 J = element_jacobian(mesh, elem, b.data());
    double det = J.determinant();
    q.min_det = std::min(q.min_det, det);
    q.max_det = std::max(q.max_det, det);
    double eta = pointwise_eta(J, delta);
    if (is_invalid(eta)) {
      poisoned = true;
    } else {
      acc += rule.weights[i] * eta * eta;
    }
    wsum += rule.weights[i];
  }
  if (poisoned) {
    q.eta_element = kInvalid;
    q.shape_quality = 0.0;
  } else {
    q.eta_element = std::sqrt(acc / wsum);
    q.shape_quality = 1.0 / q.eta_element;
  }
  return q;
}

namespace {

// rule points + element lattice nodes + the vertices of `level` recursive
// uniform bisections of the reference tet (grid spacing 2^-level)
std::vector<Eigen::Vector4d> jacobian_sample_set(const HighOrderMesh& mesh, const QuadratureRule& rule,
                                                 int subdivision_level) {
  std::vector<Eigen::Vector4d> pts;
  for (int i = 0; i < static_cast<int>(rule.points_bary.rows()); ++i)
    pts.push_back(rule.points_bary.row(i).transpose());
  const ReferenceSimplex& ref = shared_reference(3, mesh.degree);
  for (int i = 0; i < ref.node_count; ++i) pts.push_back(ref.nodes_bary.row(i).transpose());
  Eigen::MatrixXd grid = lattice_points(3, 1 << subdivision_level);
  for (int i = 0; i < static_cast<int>(grid.rows()); ++i) pts.push_back(grid.row(i).transpose());
  return pts;
}

}  // namespace

double element_scaled_jacobian(const HighOrderMesh& mesh, int elem, const QuadratureRule& rule,
                               int subdivision_level, double* min_det, double* max_det) {
  double mn = std::numeric_limits<double>::infinity(), mx = -mn;
  for (const auto& b : jacobian_sample_set(mesh, rule, subdivision_level)) {
    double det = element_jacobian(mesh, elem, b.data()).determinant();
    mn = std::min(mn, det);
    mx = std::max(mx, det);
  }
  if (min_det) *min_det = mn;
  if (max_det) *max_det = mx;
  double denom = std::abs(mx);
  return denom > 0 ? mn / denom : 0.0;
}

ElementQuality element_quality(const HighOrderMesh& mesh, int elem, const QuadratureRule& rule,
                               double delta, int subdivision_level) {
  ElementQuality q = element_shape_quality(mesh, elem, rule, delta);
  q.scaled_jacobian = element_scaled_jacobian(mesh, elem, rule, subdivision_level, &q.min_det, &q.max_det);
  return q;
}

}  // namespace hocurve
