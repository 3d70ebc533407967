#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "hocurve/reference.hpp"

using namespace hocurve;

namespace {

int binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

// Independent lattice enumeration used as oracle: all barycentric
// multi-indices of sum q, as a set (order checked separately).
std::set<std::array<int, 4>> full_lattice(int dim, int q) {
  std::set<std::array<int, 4>> s;
  if (dim == 3) {
    for (int i = 0; i <= q; ++i)
      for (int j = 0; j <= q - i; ++j)
        for (int k = 0; k <= q - i - j; ++k) s.insert({q - i - j - k, i, j, k});
  } else {
    for (int i = 0; i <= q; ++i)
      for (int j = 0; j <= q - i; ++j) s.insert({q - i - j, i, j, 0});
  }
  return s;
}

std::array<double, 4> random_bary(std::mt19937& rng, int dim) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::array<double, 4> b{0, 0, 0, 0};
  double sum = 0;
  for (int k = 0; k <= dim; ++k) {
    b[k] = u(rng);
    sum += b[k];
  }
  for (int k = 0; k <= dim; ++k) b[k] /= sum;
  return b;
}

}  // namespace

TEST_CASE("node counts match C(q+dim, dim)") {
  for (int dim : {2, 3})
    for (int q = 1; q <= 4; ++q) {
      auto ref = build_reference(dim, q);
      CHECK(ref.node_count == binom(q + dim, dim));
      CHECK(static_cast<int>(ref.multi_index.size()) == ref.node_count);
    }
}

TEST_CASE("lattice is the full equispaced barycentric lattice, no duplicates") {
  for (int dim : {2, 3})
    for (int q = 1; q <= 4; ++q) {
      auto ref = build_reference(dim, q);
      std::set<std::array<int, 4>> seen;
      for (const auto& mi : ref.multi_index) {
        int sum = mi[0] + mi[1] + mi[2] + mi[3];
        CHECK(sum == q);
        CHECK(seen.insert(mi).second);
      }
      CHECK(seen == full_lattice(dim, q));
    }
}

TEST_CASE("degree 2 tetrahedron layout: vertices then edge midpoints in table order") {
  auto ref = build_reference(3, 2);
  REQUIRE(ref.node_count == 10);
  for (int v = 0; v < 4; ++v) {
    std::array<int, 4> expect{0, 0, 0, 0};
    expect[v] = 2;
    CHECK(ref.multi_index[v] == expect);
  }
  for (int e = 0; e < 6; ++e) {
    std::array<int, 4> expect{0, 0, 0, 0};
    expect[kTetEdges[e][0]] = 1;
    expect[kTetEdges[e][1]] = 1;
    CHECK(ref.multi_index[4 + e] == expect);
  }
}

TEST_CASE("vertex-first layout for all degrees") {
  for (int dim : {2, 3})
    for (int q = 1; q <= 4; ++q) {
      auto ref = build_reference(dim, q);
      for (int v = 0; v <= dim; ++v) CHECK(ref.multi_index[v][v] == q);
    }
}

TEST_CASE("degree 1 basis at vertex 0 is (1,0,0,0)") {
  auto ref = build_reference(3, 1);
  double bary[4] = {1, 0, 0, 0};
  auto vals = ref.values_at(bary);
  CHECK(vals[0] == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(vals[i]) < 1e-14);
}

TEST_CASE("Kronecker property at nodes") {
  for (int dim : {2, 3})
    for (int q = 1; q <= 4; ++q) {
      auto ref = build_reference(dim, q);
      for (int n = 0; n < ref.node_count; ++n) {
        std::array<double, 4> b{};
        for (int k = 0; k <= dim; ++k) b[k] = ref.nodes_bary(n, k);
        auto vals = ref.values_at(b.data());
        for (int i = 0; i < ref.node_count; ++i)
          CHECK(std::abs(vals[i] - (i == n ? 1.0 : 0.0)) < 1e-12);
      }
    }
}

TEST_CASE("partition of unity and zero gradient sum at random points") {
  std::mt19937 rng(7);
  for (int dim : {2, 3})
    for (int q = 1; q <= 4; ++q) {
      auto ref = build_reference(dim, q);
      std::vector<double> vals(ref.node_count), grads(ref.node_count * dim);
      for (int trial = 0; trial < 25; ++trial) {
        auto b = random_bary(rng, dim);
        ref.eval(b.data(), vals.data(), grads.data());
        double s = 0;
        for (double v : vals) s += v;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        for (int d = 0; d < dim; ++d) {
          double g = 0;
          for (int i = 0; i < ref.node_count; ++i) g += grads[i * dim + d];
          CHECK(std::abs(g) < 1e-10);
        }
      }
    }
}

TEST_CASE("gradients match central finite differences") {
  std::mt19937 rng(13);
  auto ref = build_reference(3, 3);
  std::vector<double> vals(ref.node_count), grads(ref.node_count * 3);
  std::vector<double> vp(ref.node_count), vm(ref.node_count);
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    auto b = random_bary(rng, 3);
    ref.eval(b.data(), vals.data(), grads.data());
    for (int d = 0; d < 3; ++d) {
      // cartesian direction d perturbs bary[d+1] and bary[0]
      auto bp = b, bm = b;
      bp[d + 1] += h;
      bp[0] -= h;
      bm[d + 1] -= h;
      bm[0] += h;
      ref.eval(bp.data(), vp.data(), nullptr);
      ref.eval(bm.data(), vm.data(), nullptr);
      for (int i = 0; i < ref.node_count; ++i) {
        double fd = (vp[i] - vm[i]) / (2 * h);
        CHECK(grads[i * 3 + d] == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("degree and dimension validation") {
  CHECK_THROWS_AS(build_reference(3, 5), UnsupportedDegreeError);
  CHECK_THROWS_AS(build_reference(3, 0), UnsupportedDegreeError);
  CHECK_THROWS_AS(build_reference(1, 2), InvalidInputError);
  CHECK_THROWS_AS(build_reference(4, 2), InvalidInputError);
}

TEST_CASE("tabulated basis agrees with pointwise evaluation") {
  auto ref = build_reference(3, 4);
  auto pts = lattice_points(3, 3);
  auto tab = tabulate_basis(ref, pts);
  std::vector<double> vals(ref.node_count), grads(ref.node_count * 3);
  for (int p = 0; p < pts.rows(); ++p) {
    double b[4] = {pts(p, 0), pts(p, 1), pts(p, 2), pts(p, 3)};
    ref.eval(b, vals.data(), grads.data());
    for (int i = 0; i < ref.node_count; ++i) {
      CHECK(tab.N(p, i) == doctest::Approx(vals[i]).epsilon(1e-14));
      for (int d = 0; d < 3; ++d)
        CHECK(tab.dN[d](p, i) == doctest::Approx(grads[i * 3 + d]).epsilon(1e-14));
    }
  }
}

TEST_CASE("reference subdivision covers the simplex with positive cells") {
  for (int n = 1; n <= 5; ++n) {
    auto grid = subdivide_reference(3, n);
    CHECK(static_cast<int>(grid.cells.size()) == n * n * n);
    double total = 0;
    for (const auto& c : grid.cells) {
      Eigen::Vector3d pts[4];
      for (int k = 0; k < 4; ++k)
        pts[k] = Eigen::Vector3d(grid.points_bary(c[k], 1), grid.points_bary(c[k], 2),
                                 grid.points_bary(c[k], 3));
      Eigen::Matrix3d J;
      J.col(0) = pts[1] - pts[0];
      J.col(1) = pts[2] - pts[0];
      J.col(2) = pts[3] - pts[0];
      double v = J.determinant() / 6.0;
      CHECK(v > 0);
      total += v;
    }
    CHECK(total == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  }
  for (int n = 1; n <= 5; ++n) {
    auto grid = subdivide_reference(2, n);
    CHECK(static_cast<int>(grid.cells.size()) == n * n);
    double total = 0;
    for (const auto& c : grid.cells) {
      Eigen::Vector2d a(grid.points_bary(c[0], 1), grid.points_bary(c[0], 2));
      Eigen::Vector2d b(grid.points_bary(c[1], 1), grid.points_bary(c[1], 2));
      Eigen::Vector2d d(grid.points_bary(c[2], 1), grid.points_bary(c[2], 2));
      double area = 0.5 * ((b.x() - a.x()) * (d.y() - a.y()) - (d.x() - a.x()) * (b.y() - a.y()));
      CHECK(area > 0);
      total += area;
    }
    CHECK(total == doctest::Approx(0.5).epsilon(1e-12));
  }
}
