#include "hocurve/reference.hpp"

#include <map>

namespace hocurve {

namespace {

std::vector<std::array<int, 4>> canonical_lattice(int dim, int q) {
  std::vector<std::array<int, 4>> mi;
  auto push = [&](int a, int b, int c, int d) { mi.push_back({a, b, c, d}); };
  if (dim == 3) {
    for (int v = 0; v < 4; ++v) {
      std::array<int, 4> m{0, 0, 0, 0};
      m[v] = q;
      mi.push_back(m);
    }
    for (const auto& e : kTetEdges)
      for (int s = 1; s <= q - 1; ++s) {
        std::array<int, 4> m{0, 0, 0, 0};
        m[e[0]] = q - s;
        m[e[1]] = s;
        mi.push_back(m);
      }
    for (const auto& f : kTetFaces)
      for (int s = 1; s <= q - 2; ++s)
        for (int t = 1; t <= q - 1 - s; ++t) {
          std::array<int, 4> m{0, 0, 0, 0};
          m[f[0]] = q - s - t;
          m[f[1]] = s;
          m[f[2]] = t;
          mi.push_back(m);
        }
    for (int i = 1; i <= q - 3; ++i)
      for (int j = 1; j <= q - 2 - i; ++j)
        for (int k = 1; k <= q - 1 - i - j; ++k) push(q - i - j - k, i, j, k);
  } else {
    for (int v = 0; v < 3; ++v) {
      std::array<int, 4> m{0, 0, 0, 0};
      m[v] = q;
      mi.push_back(m);
    }
    for (const auto& e : kTriEdges)
      for (int s = 1; s <= q - 1; ++s) {
        std::array<int, 4> m{0, 0, 0, 0};
        m[e[0]] = q - s;
        m[e[1]] = s;
        mi.push_back(m);
      }
    for (int i = 1; i <= q - 2; ++i)
      for (int j = 1; j <= q - 1 - i; ++j) push(q - i - j, i, j, 0);
  }
  return mi;
}

std::vector<std::array<int, 3>> monomial_set(int dim, int q) {
  std::vector<std::array<int, 3>> mono;
  for (int total = 0; total <= q; ++total) {
    if (dim == 3) {
      for (int a = total; a >= 0; --a)
        for (int b = total - a; b >= 0; --b) mono.push_back({a, b, total - a - b});
    } else {
      for (int a = total; a >= 0; --a) mono.push_back({a, total - a, 0});
    }
  }
  return mono;
}

inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

void ReferenceSimplex::eval(const double* bary, double* values, double* grads) const {
  const int nn = node_count;
  const int nm = static_cast<int>(monomials.size());
  // reference Cartesian coordinates
  const double x[3] = {bary[1], bary[2], dim == 3 ? bary[3] : 0.0};

  Eigen::VectorXd m(nm);
  Eigen::MatrixXd dm;
  if (grads) dm.setZero(nm, dim);
  for (int k = 0; k < nm; ++k) {
    const auto& e = monomials[k];
    double p0 = ipow(x[0], e[0]), p1 = ipow(x[1], e[1]), p2 = ipow(x[2], e[2]);
    m[k] = p0 * p1 * p2;
    if (grads) {
      if (e[0] > 0) dm(k, 0) = e[0] * ipow(x[0], e[0] - 1) * p1 * p2;
      if (e[1] > 0) dm(k, 1) = e[1] * p0 * ipow(x[1], e[1] - 1) * p2;
      if (dim == 3 && e[2] > 0) dm(k, 2) = e[2] * p0 * p1 * ipow(x[2], e[2] - 1);
    }
  }
  Eigen::Map<Eigen::VectorXd>(values, nn) = coeff.transpose() * m;
  if (grads) {
    Eigen::MatrixXd g = coeff.transpose() * dm;  // nn x dim
    for (int i = 0; i < nn; ++i)
      for (int d = 0; d < dim; ++d) grads[i * dim + d] = g(i, d);
  }
}

Eigen::VectorXd ReferenceSimplex::values_at(const double* bary) const {
  Eigen::VectorXd v(node_count);
  eval(bary, v.data(), nullptr);
  return v;
}

ReferenceSimplex build_reference(int dim, int degree) {
  if (dim != 2 && dim != 3) throw InvalidInputError("reference simplex dimension must be 2 or 3");
  if (degree < 1 || degree > 4)
    throw UnsupportedDegreeError("polynomial degree must be in 1..4, got " + std::to_string(degree));

  ReferenceSimplex ref;
  ref.dim = dim;
  ref.degree = degree;
  ref.multi_index = canonical_lattice(dim, degree);
  ref.node_count = static_cast<int>(ref.multi_index.size());
  ref.monomials = monomial_set(dim, degree);

  ref.nodes_bary.resize(ref.node_count, dim + 1);
  for (int i = 0; i < ref.node_count; ++i)
    for (int k = 0; k <= dim; ++k) ref.nodes_bary(i, k) = double(ref.multi_index[i][k]) / degree;

  const int nm = static_cast<int>(ref.monomials.size());
  if (nm != ref.node_count) throw Error("internal: monomial count mismatch");
  Eigen::MatrixXd V(ref.node_count, nm);
  for (int i = 0; i < ref.node_count; ++i) {
    double x[3] = {ref.nodes_bary(i, 1), ref.nodes_bary(i, 2), dim == 3 ? ref.nodes_bary(i, 3) : 0.0};
    for (int k = 0; k < nm; ++k) {
      const auto& e = ref.monomials[k];
      V(i, k) = ipow(x[0], e[0]) * ipow(x[1], e[1]) * ipow(x[2], e[2]);
    }
  }
  ref.coeff = V.fullPivLu().inverse();
  return ref;
}

TabulatedBasis tabulate_basis(const ReferenceSimplex& ref, const Eigen::MatrixXd& pts_bary) {
  const int np = static_cast<int>(pts_bary.rows());
  TabulatedBasis tab;
  tab.N.resize(np, ref.node_count);
  for (int d = 0; d < ref.dim; ++d) tab.dN[d].resize(np, ref.node_count);
  std::vector<double> vals(ref.node_count), grads(ref.node_count * ref.dim);
  std::vector<double> b(ref.dim + 1);
  for (int p = 0; p < np; ++p) {
    for (int k = 0; k <= ref.dim; ++k) b[k] = pts_bary(p, k);
    ref.eval(b.data(), vals.data(), grads.data());
    for (int i = 0; i < ref.node_count; ++i) {
      tab.N(p, i) = vals[i];
      for (int d = 0; d < ref.dim; ++d) tab.dN[d](p, i) = grads[i * ref.dim + d];
    }
  }
  return tab;
}

Eigen::MatrixXd lattice_points(int dim, int n) {
  std::vector<std::array<int, 4>> mi;
  if (dim == 3) {
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n - i; ++j)
        for (int k = 0; k <= n - i - j; ++k) mi.push_back({n - i - j - k, i, j, k});
  } else {
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n - i; ++j) mi.push_back({n - i - j, i, j, 0});
  }
  Eigen::MatrixXd pts(mi.size(), dim + 1);
  for (std::size_t r = 0; r < mi.size(); ++r)
    for (int k = 0; k <= dim; ++k) pts(static_cast<int>(r), k) = double(mi[r][k]) / n;
  return pts;
}

SubdivisionGrid subdivide_reference(int dim, int n) {
  if (n < 1) throw InvalidInputError("subdivision level must be >= 1");
  SubdivisionGrid grid;
  grid.points_bary = lattice_points(dim, n);

  if (dim == 2) {
    std::map<std::array<int, 2>, int> idx;
    int c = 0;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n - i; ++j) idx[{i, j}] = c++;
    for (int i = 0; i <= n - 1; ++i)
      for (int j = 0; j <= n - 1 - i; ++j) {
        grid.cells.push_back({idx[{i, j}], idx[{i + 1, j}], idx[{i, j + 1}], 0});
        if (i + j <= n - 2)
          grid.cells.push_back({idx[{i + 1, j}], idx[{i + 1, j + 1}], idx[{i, j + 1}], 0});
      }
    return grid;
  }

  std::map<std::array<int, 3>, int> idx;
  std::vector<std::array<int, 3>> coord;
  int c = 0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n - i; ++j)
      for (int k = 0; k <= n - i - j; ++k) {
        idx[{i, j, k}] = c++;
        coord.push_back({i, j, k});
      }
  auto vol_sign = [&](const std::array<int, 4>& t) {
    // orientation in reference Cartesian coordinates of the lattice
    auto pt = [&](int node) {
      const auto& k = coord[static_cast<std::size_t>(node)];
      return Vec3(k[0], k[1], k[2]);
    };
    Vec3 a = pt(t[0]), b = pt(t[1]), cc = pt(t[2]), d = pt(t[3]);
    Mat3 J;
    J.col(0) = b - a;
    J.col(1) = cc - a;
    J.col(2) = d - a;
    return J.determinant();
  };
  auto emit = [&](std::array<int, 4> t) {
    if (vol_sign(t) < 0) std::swap(t[2], t[3]);
    grid.cells.push_back(t);
  };
  for (int i = 0; i <= n - 1; ++i)
    for (int j = 0; j <= n - 1 - i; ++j)
      for (int k = 0; k <= n - 1 - i - j; ++k) {
        int p = idx[{i, j, k}];
        int A = idx[{i + 1, j, k}], B = idx[{i, j + 1, k}], C = idx[{i, j, k + 1}];
        emit({p, A, B, C});
        if (i + j + k <= n - 2) {
          int D = idx[{i + 1, j + 1, k}], E = idx[{i + 1, j, k + 1}], F = idx[{i, j + 1, k + 1}];
          emit({A, F, B, D});
          emit({A, F, D, E});
          emit({A, F, E, C});
          emit({A, F, C, B});
          if (i + j + k <= n - 3) {
            int G = idx[{i + 1, j + 1, k + 1}];
            emit({D, E, F, G});
          }
        }
      }
  return grid;
}

}  // namespace hocurve
