#include "hocurve/quadrature.hpp"

#include <cmath>

namespace hocurve {

void gauss_jacobi(int n, int alpha, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw InvalidInputError("gauss_jacobi: need at least one point");
  const double a = alpha, b = 0.0;
  // Golub-Welsch on [-1,1] with weight (1-x)^alpha, then map to [0,1] and
  // strip the weight normalization so that sum(w) = 1/(alpha+1).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  auto diag = [&](int k) {
    if (k == 0 && a + b == 0.0) return 0.0;
    double s = 2 * k + a + b;
    return (b * b - a * a) / (s * (s + 2));
  };
  auto offdiag = [&](int k) {  // b_k for k >= 1
    double s = 2 * k + a + b;
    return 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1) * (s - 1));
  };
  for (int k = 0; k < n; ++k) J(k, k) = diag(k);
  for (int k = 1; k < n; ++k) {
    double bk = offdiag(k);
    J(k, k - 1) = J(k - 1, k) = std::sqrt(bk);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  // total mass of (1-x)^a (1+x)^b on [-1,1] with b = 0
  const double mu0 = std::pow(2.0, a + 1.0) / (a + 1.0);
  nodes.resize(n);
  weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double x = es.eigenvalues()[k];
    double w = mu0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
    nodes[k] = 0.5 * (x + 1.0);            // map to [0,1]
    weights[k] = w / std::pow(2.0, a + 1.0);  // (1-x)^a dx -> 2^(a+1) (1-t)^a dt
  }
}

namespace {

QuadratureRule conical_product(int dim, int exactness) {
  const int n = (exactness + 2) / 2;  // ceil((d+1)/2)
  Eigen::VectorXd x0, w0, x1, w1, x2, w2;
  QuadratureRule rule;
  rule.dim = dim;
  rule.exactness = exactness;
  if (dim == 3) {
    gauss_jacobi(n, 2, x0, w0);
    gauss_jacobi(n, 1, x1, w1);
    gauss_jacobi(n, 0, x2, w2);
    rule.points_bary.resize(n * n * n, 4);
    rule.weights.resize(n * n * n);
    int p = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k, ++p) {
          // collapsed coordinates: x = a, y = b(1-a), z = c(1-a)(1-b)
          double x = x0[i];
          double y = x1[j] * (1 - x0[i]);
          double z = x2[k] * (1 - x0[i]) * (1 - x1[j]);
          rule.points_bary(p, 0) = 1 - x - y - z;
          rule.points_bary(p, 1) = x;
          rule.points_bary(p, 2) = y;
          rule.points_bary(p, 3) = z;
          rule.weights[p] = w0[i] * w1[j] * w2[k];
        }
  } else {
    gauss_jacobi(n, 1, x0, w0);
    gauss_jacobi(n, 0, x1, w1);
    rule.points_bary.resize(n * n, 3);
    rule.weights.resize(n * n);
    int p = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j, ++p) {
        double x = x0[i];
        double y = x1[j] * (1 - x0[i]);
        rule.points_bary(p, 0) = 1 - x - y;
        rule.points_bary(p, 1) = x;
        rule.points_bary(p, 2) = y;
        rule.weights[p] = w0[i] * w1[j];
      }
  }
  return rule;
}

}  // namespace

QuadratureRule quadrature(int dim, int exactness) {
  if (dim != 2 && dim != 3) throw InvalidInputError("quadrature dimension must be 2 or 3");
  if (exactness < 0) throw InvalidInputError("quadrature exactness must be >= 0");
  QuadratureRule rule;
  rule.dim = dim;
  rule.exactness = exactness;
  if (dim == 3 && exactness <= 1) {
    rule.exactness = 1;
    rule.points_bary.resize(1, 4);
    rule.points_bary << 0.25, 0.25, 0.25, 0.25;
    rule.weights.resize(1);
    rule.weights << 1.0 / 6.0;
    return rule;
  }
  if (dim == 3 && exactness == 2) {
    const double a = (5.0 - std::sqrt(5.0)) / 20.0;  // 0.1381966...
    const double b = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
    rule.points_bary.resize(4, 4);
    rule.weights = Eigen::VectorXd::Constant(4, 1.0 / 24.0);
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) rule.points_bary(i, k) = (i == k) ? b : a;
    return rule;
  }
  if (dim == 2 && exactness <= 1) {
    rule.exactness = 1;
    rule.points_bary.resize(1, 3);
    rule.points_bary << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    rule.weights.resize(1);
    rule.weights << 0.5;
    return rule;
  }
  if (dim == 2 && exactness == 2) {
    rule.points_bary.resize(3, 3);
    rule.points_bary << 2.0 / 3, 1.0 / 6, 1.0 / 6,  //
        1.0 / 6, 2.0 / 3, 1.0 / 6,                  //
        1.0 / 6, 1.0 / 6, 2.0 / 3;
    rule.weights = Eigen::VectorXd::Constant(3, 1.0 / 6.0);
    return rule;
  }
  return conical_product(dim, exactness);
}

}  // namespace hocurve
