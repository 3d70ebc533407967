#pragma once

#include <array>
#include <map>
#include <random>

#include "hocurve/mesh.hpp"

namespace hocurve::testing {

inline LinearMesh single_tet() {
  LinearMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.tets = {{0, 1, 2, 3}};
  m.boundary = {{{0, 2, 1}, 1}, {{0, 1, 3}, 2}, {{0, 3, 2}, 3}, {{1, 2, 3}, 4}};
  return m;
}

inline LinearMesh two_tets() {
  LinearMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  m.tets = {{0, 1, 2, 3}, {1, 4, 2, 3}};
  m.boundary = {{{0, 2, 1}, 1}, {{0, 1, 3}, 1}, {{0, 3, 2}, 1},
                {{1, 2, 4}, 2}, {{1, 4, 3}, 2}, {{2, 3, 4}, 2}};
  return m;
}

/// Axis-aligned box split into nx*ny*nz cells of 6 Kuhn tets each.
/// Boundary marks: 1 x-min, 2 x-max, 3 y-min, 4 y-max, 5 z-min, 6 z-max.
inline LinearMesh box_mesh(int nx, int ny, int nz, Vec3 lo = {0, 0, 0}, Vec3 hi = {1, 1, 1}) {
  LinearMesh m;
  auto vid = [&](int i, int j, int k) { return (i * (ny + 1) + j) * (nz + 1) + k; };
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j)
      for (int k = 0; k <= nz; ++k)
        m.vertices.push_back({lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny,
                              lo.z() + (hi.z() - lo.z()) * k / nz});
  static const int kuhn[6][4][3] = {
      {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}}, {{0, 0, 0}, {1, 1, 0}, {0, 1, 0}, {1, 1, 1}},
      {{0, 0, 0}, {0, 1, 0}, {0, 1, 1}, {1, 1, 1}}, {{0, 0, 0}, {0, 1, 1}, {0, 0, 1}, {1, 1, 1}},
      {{0, 0, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}}, {{0, 0, 0}, {1, 0, 1}, {1, 0, 0}, {1, 1, 1}}};
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k)
        for (const auto& t : kuhn)
          m.tets.push_back({vid(i + t[0][0], j + t[0][1], k + t[0][2]), vid(i + t[1][0], j + t[1][1], k + t[1][2]),
                            vid(i + t[2][0], j + t[2][1], k + t[2][2]), vid(i + t[3][0], j + t[3][1], k + t[3][2])});
  // boundary: once-seen tet faces, marked by which box side they lie on
  std::map<std::array<int, 3>, int> count;
  auto sorted = [](std::array<int, 3> f) {
    std::sort(f.begin(), f.end());
    return f;
  };
  static const int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : m.tets)
    for (const auto& f : faces) count[sorted({t[f[0]], t[f[1]], t[f[2]]})]++;
  for (const auto& t : m.tets)
    for (const auto& f : faces) {
      std::array<int, 3> tri{t[f[0]], t[f[1]], t[f[2]]};
      if (count[sorted(tri)] != 1) continue;
      const Vec3& a = m.vertices[tri[0]];
      const Vec3& b = m.vertices[tri[1]];
      const Vec3& c = m.vertices[tri[2]];
      int mark = 0;
      const double eps = 1e-12;
      for (int d = 0; d < 3 && mark == 0; ++d) {
        if (std::abs(a[d] - lo[d]) < eps && std::abs(b[d] - lo[d]) < eps && std::abs(c[d] - lo[d]) < eps)
          mark = 1 + 2 * d;
        if (std::abs(a[d] - hi[d]) < eps && std::abs(b[d] - hi[d]) < eps && std::abs(c[d] - hi[d]) < eps)
          mark = 2 + 2 * d;
      }
      m.boundary.push_back({tri, mark});
      count[sorted(tri)] = -1;  // emit once
    }
  return m;
}

/// Applies a smooth polynomial warp of the given total degree to every node
/// (exactly representable by a same-degree mesh). Small amplitude keeps
/// elements valid.
inline void warp_nodes(HighOrderMesh& mesh, int degree, double amp, unsigned seed = 42) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  std::array<std::array<double, 10>, 3> c{};
  for (auto& row : c)
    for (auto& v : row) v = u(rng);
  for (auto& x : mesh.nodes) {
    Vec3 p = x;
    for (int d = 0; d < 3; ++d) {
      double w = c[d][0] * p.x() + c[d][1] * p.y() + c[d][2] * p.z();
      if (degree >= 2)
        w += c[d][3] * p.x() * p.y() + c[d][4] * p.y() * p.z() + c[d][5] * p.x() * p.z() +
             c[d][6] * p.x() * p.x() + c[d][7] * p.y() * p.y() + c[d][8] * p.z() * p.z();
      x[d] += w;
    }
  }
}

inline HighOrderMesh elevated(const LinearMesh& lin, int degree) {
  HighOrderMesh m = from_linear(lin);
  while (m.degree < degree) m = elevate_degree(m);
  return m;
}

}  // namespace hocurve::testing
