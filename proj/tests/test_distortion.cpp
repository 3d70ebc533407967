#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "hocurve/distortion.hpp"
#include "hocurve/quadrature.hpp"

using namespace hocurve;
using namespace hocurve::testing;

namespace {

Mat3 random_rotation(std::mt19937& rng) {
  std::normal_distribution<double> g;
  Mat3 M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = g(rng);
  Eigen::HouseholderQR<Mat3> qr(M);
  Mat3 Q = qr.householderQ();
  if (Q.determinant() < 0) Q.col(0) = -Q.col(0);
  return Q;
}

Mat3 random_jacobian(std::mt19937& rng, double min_det) {
  std::normal_distribution<double> g;
  for (;;) {
    Mat3 A = Mat3::Identity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) += 0.4 * g(rng);
    if (A.determinant() > min_det) return A;
  }
}

}  // namespace

TEST_CASE("rectified determinant") {
  CHECK(det0(2.0) == 2.0);
  CHECK(det0(-3.0) == 0.0);
  CHECK(det0(0.0) == 0.0);
}

TEST_CASE("point-wise distortion frozen values and sentinel") {
  CHECK(pointwise_eta(Mat3::Identity()) == 1.0);
  Mat3 D = Vec3(2, 1, 1).asDiagonal();
  CHECK(std::abs(pointwise_eta(D) - std::cbrt(2.0)) < 1e-12);
  Mat3 neg = Vec3(1, 1, -0.5).asDiagonal();
  CHECK(is_invalid(pointwise_eta(neg)));
  Mat3 sing = Vec3(1, 1, 0).asDiagonal();
  CHECK(is_invalid(pointwise_eta(sing)));
  CHECK(kInvalid > 1e300);
}

TEST_CASE("distortion is invariant to scaled rotations") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> cdist(0.1, 10.0);
  for (int k = 0; k < 100; ++k) {
    Mat3 J = random_jacobian(rng, 0.05);
    double base = pointwise_eta(J);
    Mat3 R = random_rotation(rng);
    double c = cdist(rng);
    CHECK(std::abs(pointwise_eta(c * R * J) - base) < 1e-12 * base);
    CHECK(std::abs(pointwise_eta(J * R) - base) < 1e-12 * base);
  }
  for (int k = 0; k < 20; ++k) {
    Mat3 R = random_rotation(rng);
    CHECK(std::abs(pointwise_eta(cdist(rng) * R) - 1.0) < 1e-12);
  }
}

TEST_CASE("distortion is bounded below by one on positive Jacobians") {
  std::mt19937 rng(29);
  std::normal_distribution<double> g;
  int found = 0;
  while (found < 10000) {
    Mat3 A;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) = g(rng);
    if (A.determinant() <= 0) continue;
    ++found;
    CHECK(pointwise_eta(A) >= 1.0 - 1e-13);
  }
}

TEST_CASE("cofactor matrix differentiates the determinant") {
  std::mt19937 rng(31);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    Mat3 A;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) = g(rng);
    Mat3 C = cofactor(A);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(A.row(i).dot(C.row(i)) - A.determinant()) < 1e-12);
    const double h = 1e-6;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Mat3 Ap = A, Am = A;
        Ap(i, j) += h;
        Am(i, j) -= h;
        double fd = (Ap.determinant() - Am.determinant()) / (2 * h);
        CHECK(std::abs(C(i, j) - fd) < 1e-7 * std::max(1.0, std::abs(fd)));
      }
  }
}

TEST_CASE("first derivative of squared distortion matches finite differences") {
  std::mt19937 rng(37);
  for (double delta : {0.0, 0.05}) {
    for (int k = 0; k < 25; ++k) {
      Mat3 A = random_jacobian(rng, 0.25);
      if (delta > 0) A = Vec3(1, 1, -1).asDiagonal() * A;  // smoothing handles inverted states
      EtaKernel ker = eta_kernel(A, delta);
      Mat3 P = ker.P();
      const double h = 1e-6;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          Mat3 Ap = A, Am = A;
          Ap(i, j) += h;
          Am(i, j) -= h;
          double fd = (eta_kernel(Ap, delta).eta2() - eta_kernel(Am, delta).eta2()) / (2 * h);
          CHECK(std::abs(P(i, j) - fd) < 5e-6 * std::max(1.0, std::abs(fd)));
        }
    }
  }
}

TEST_CASE("second derivative kernels match finite differences of the first") {
  std::mt19937 rng(41);
  std::normal_distribution<double> g;
  for (double delta : {0.0, 0.05}) {
    for (int k = 0; k < 20; ++k) {
      Mat3 A = random_jacobian(rng, 0.3);
      if (delta > 0 && k % 2) A = -A;  // exercise the smooth negative branch too
      EtaKernel ker = eta_kernel(A, delta);
      Mat3 dA;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) dA(i, j) = g(rng);
      const double h = 1e-6;
      Mat3 fd = (eta_kernel(A + h * dA, delta).P() - eta_kernel(A - h * dA, delta).P()) / (2 * h);
      Mat3 got = ker.dP(dA);
      CHECK((got - fd).norm() < 2e-5 * std::max(1.0, fd.norm()));

      // linearity in the direction
      Mat3 two = ker.dP(2 * dA);
      CHECK((two - 2 * got).norm() < 1e-12 * std::max(1.0, got.norm()));
    }
  }
}

TEST_CASE("diagonal row blocks agree with the full directional derivative and are symmetric") {
  std::mt19937 rng(43);
  std::normal_distribution<double> g;
  for (double delta : {0.0, 0.05}) {
    for (int k = 0; k < 15; ++k) {
      Mat3 A = random_jacobian(rng, 0.3);
      EtaKernel ker = eta_kernel(A, delta);
      for (int axis = 0; axis < 3; ++axis) {
        Mat3 M = ker.diag_block(axis);
        CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-13 * std::max(1.0, M.norm()));
        Vec3 da(g(rng), g(rng), g(rng));
        Mat3 dir = Mat3::Zero();
        dir.row(axis) = da.transpose();
        Vec3 via_full = ker.dP(dir).row(axis).transpose();
        CHECK((M * da - via_full).norm() < 1e-12 * std::max(1.0, via_full.norm()));
      }
    }
  }
}

TEST_CASE("straight and uniformly scaled elements have unit shape quality") {
  for (int deg : {1, 2, 3}) {
    HighOrderMesh m = elevated(single_tet(), deg);
    QuadratureRule rule = quadrature(3, 2 * (3 * deg - 1) + 4);
    ElementQuality q = element_quality(m, 0, rule);
    CHECK(std::abs(q.shape_quality - 1.0) < 1e-13);
    CHECK(std::abs(q.scaled_jacobian - 1.0) < 1e-12);
    CHECK(std::abs(q.eta_element - 1.0) < 1e-13);

    for (auto& x : m.nodes) x *= 2.0;  // initial stays put: pure scaling of the map
    q = element_quality(m, 0, rule);
    CHECK(std::abs(q.shape_quality - 1.0) < 1e-13);
    CHECK(std::abs(q.scaled_jacobian - 1.0) < 1e-12);
  }
}

TEST_CASE("shape quality of a perturbed quadratic tet is quadrature-converged") {
  HighOrderMesh m = elevated(single_tet(), 2);
  m.nodes[4] += Vec3(0, 0.1, 0);  // mid-edge node of edge (0,1), 10% of edge length
  QuadratureRule rule = quadrature(3, 2 * (3 * 2 - 1) + 4);
  QuadratureRule denser = quadrature(3, rule.exactness + 4);
  double a = element_shape_quality(m, 0, rule).shape_quality;
  double b = element_shape_quality(m, 0, denser).shape_quality;
  CHECK(a > 0);
  CHECK(a < 1);
  CHECK(std::abs(a - b) < 1e-4);
}

TEST_CASE("shape quality decreases monotonically under growing displacement") {
  QuadratureRule rule = quadrature(3, 14);
  double prev = 1.0;
  for (int k = 1; k <= 10; ++k) {
    HighOrderMesh m = elevated(single_tet(), 2);
    m.nodes[4] += Vec3(0, 0.02 * k, 0);
    double q = element_shape_quality(m, 0, rule).shape_quality;
    CHECK(q < prev);
    CHECK(q > 0);
    prev = q;
  }
}

TEST_CASE("fully inverted element is poisoned to zero quality") {
  HighOrderMesh m = elevated(single_tet(), 2);
  for (auto& x : m.nodes) x[0] = -x[0];
  QuadratureRule rule = quadrature(3, 10);
  ElementQuality q = element_quality(m, 0, rule);
  CHECK(q.shape_quality == 0.0);
  CHECK(is_invalid(q.eta_element));
  CHECK(q.scaled_jacobian <= 0.0);
  CHECK(!q.valid());
  CHECK(q.min_det < 0);
}

TEST_CASE("scaled Jacobian of curved elements matches a dense sampling oracle") {
  HighOrderMesh m = elevated(single_tet(), 2);
  warp_nodes(m, 2, 0.05, 4242);
  QuadratureRule rule = quadrature(3, 14);
  double mn = 0, mx = 0;
  double got = element_scaled_jacobian(m, 0, rule, 4, &mn, &mx);
  CHECK(got <= 1.0);

  // dense referee: the full degree-80 lattice, 91881 points including the
  // whole boundary (random interior points systematically miss boundary
  // extrema)
  Eigen::MatrixXd dense = lattice_points(3, 80);
  double dmn = std::numeric_limits<double>::infinity(), dmx = -dmn;
  for (int i = 0; i < static_cast<int>(dense.rows()); ++i) {
    Eigen::Vector4d b = dense.row(i).transpose();
    double det = element_jacobian(m, 0, b.data()).determinant();
    dmn = std::min(dmn, det);
    dmx = std::max(dmx, det);
  }
  CHECK(std::abs(got - dmn / std::abs(dmx)) < 1e-3);
  CHECK(std::abs(mn - dmn) < 1e-3);
  CHECK(std::abs(mx - dmx) < 1e-3);
}

TEST_CASE("quality ranges hold across a warped mesh") {
  for (int deg : {2, 3}) {
    HighOrderMesh m = elevated(box_mesh(2, 2, 2), deg);
    warp_nodes(m, deg, 0.04, 7);
    QuadratureRule rule = quadrature(3, 2 * (3 * deg - 1) + 4);
    for (int e = 0; e < static_cast<int>(m.elems.size()); ++e) {
      ElementQuality q = element_quality(m, e, rule);
      CHECK(q.shape_quality >= 0.0);
      CHECK(q.shape_quality <= 1.0 + 1e-13);
      CHECK(q.scaled_jacobian <= 1.0 + 1e-12);
      CHECK((q.scaled_jacobian <= 0.0) == (q.min_det <= 0.0));
    }
  }
}
