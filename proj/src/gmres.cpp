#include "hocurve/gmres.hpp"

#include <cmath>

#include "hocurve/common.hpp"

namespace hocurve {

GmresResult gmres_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                        const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& precondition,
                        const Eigen::VectorXd& rhs, double rel_tol, int restart,
                        int max_iterations) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidInputError("gmres tolerance must be in (0,1)");
  if (restart < 1 || max_iterations < 1) throw InvalidInputError("gmres iteration limits must be positive");

  const Eigen::Index n = rhs.size();
  GmresResult out;
  out.x = Eigen::VectorXd::Zero(n);

  const Eigen::VectorXd z0 = precondition(rhs);
  const double beta0 = z0.norm();
  if (beta0 == 0.0) {
    out.converged = true;
    return out;
  }
  const double target = rel_tol * beta0;

  Eigen::VectorXd best_x = out.x;
  double best_res = beta0;

  Eigen::MatrixXd V(n, restart + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(restart + 1, restart);
  Eigen::VectorXd cs(restart), sn(restart), g(restart + 1);

  while (out.iterations < max_iterations) {
    Eigen::VectorXd r = precondition(rhs - apply(out.x));
    double beta = r.norm();
    if (beta <= target) {
      out.converged = true;
      out.residual = beta / beta0;
      return out;
    }
    const double cycle_start = beta;

    V.col(0) = r / beta;
    g.setZero();
    g[0] = beta;

    int m = 0;
    for (; m < restart && out.iterations < max_iterations; ++m) {
      ++out.iterations;
      Eigen::VectorXd w = precondition(apply(V.col(m)));
      // modified Gram-Schmidt
      for (int i = 0; i <= m; ++i) {
        H(i, m) = w.dot(V.col(i));
        w -= H(i, m) * V.col(i);
      }
      H(m + 1, m) = w.norm();
      const bool breakdown = H(m + 1, m) < 1e-300;
      if (!breakdown) V.col(m + 1) = w / H(m + 1, m);

      // apply stored Givens rotations, then zero the new subdiagonal
      for (int i = 0; i < m; ++i) {
        const double t = cs[i] * H(i, m) + sn[i] * H(i + 1, m);
        H(i + 1, m) = -sn[i] * H(i, m) + cs[i] * H(i + 1, m);
        H(i, m) = t;
      }
      const double denom = std::hypot(H(m, m), H(m + 1, m));
      if (denom == 0.0) {
        cs[m] = 1.0;
        sn[m] = 0.0;
      } else {
        cs[m] = H(m, m) / denom;
        sn[m] = H(m + 1, m) / denom;
      }
      H(m, m) = denom;
      H(m + 1, m) = 0.0;
      g[m + 1] = -sn[m] * g[m];
      g[m] = cs[m] * g[m];
      beta = std::abs(g[m + 1]);

      if (beta <= target || breakdown) {
        ++m;
        break;
      }
    }

    if (m > 0) {
      // back substitution on the triangularized Hessenberg system
      Eigen::VectorXd y(m);
      for (int i = m - 1; i >= 0; --i) {
        double s = g[i];
        for (int j = i + 1; j < m; ++j) s -= H(i, j) * y[j];
        y[i] = s / H(i, i);
      }
      out.x += V.leftCols(m) * y;
    }

    const Eigen::VectorXd rr = precondition(rhs - apply(out.x));
    const double achieved = rr.norm();
    if (achieved < best_res) {
      best_res = achieved;
      best_x = out.x;
    }
    if (achieved <= target) {
      out.converged = true;
      out.residual = achieved / beta0;
      return out;
    }
    if (achieved >= cycle_start * (1.0 - 1e-12)) {
      out.stagnated = true;
      break;
    }
  }

  out.x = best_x;
  out.residual = best_res / beta0;
  return out;
}

GmresResult gmres_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                        const Eigen::VectorXd& rhs, double rel_tol, int restart,
                        int max_iterations) {
  return gmres_solve(apply, [](const Eigen::VectorXd& v) { return v; }, rhs, rel_tol, restart,
                     max_iterations);
}

BlockSorPreconditioner::BlockSorPreconditioner(
    const std::array<Eigen::SparseMatrix<double>, 3>& blocks, int sweeps, double relaxation)
    : sweeps_(sweeps), relaxation_(relaxation) {
  if (sweeps < 1) throw InvalidInputError("preconditioner needs at least one sweep");
  if (!(relaxation > 0.0 && relaxation < 2.0))
    throw InvalidInputError("SOR relaxation must be in (0,2)");
  n_ = static_cast<int>(blocks[0].rows());
  for (int c = 0; c < 3; ++c) {
    if (blocks[c].rows() != n_ || blocks[c].cols() != n_)
      throw InvalidInputError("preconditioner blocks must be square and equally sized");
    blocks_[c] = blocks[c];  // row-major copy for cheap row sweeps
    diag_[c] = blocks[c].diagonal();
    for (int i = 0; i < n_; ++i)
      if (diag_[c][i] == 0.0) throw InvalidInputError("preconditioner block has a zero diagonal");
  }
}

Eigen::VectorXd BlockSorPreconditioner::apply(const Eigen::VectorXd& r) const {
  if (r.size() != 3 * static_cast<Eigen::Index>(n_))
    throw InvalidInputError("preconditioner input has the wrong length");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(r.size());
  for (int c = 0; c < 3; ++c) {
    const auto& B = blocks_[c];
    const auto& d = diag_[c];
    auto zc = z.segment(static_cast<Eigen::Index>(c) * n_, n_);
    const auto rc = r.segment(static_cast<Eigen::Index>(c) * n_, n_);
    auto sweep_row = [&](int i) {
      double s = rc[i];
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(B, i); it; ++it)
        if (it.col() != i) s -= it.value() * zc[it.col()];
      zc[i] += relaxation_ * (s / d[i] - zc[i]);
    };
    for (int k = 0; k < sweeps_; ++k) {
      for (int i = 0; i < n_; ++i) sweep_row(i);
      for (int i = n_ - 1; i >= 0; --i) sweep_row(i);
    }
  }
  return z;
}

}  // namespace hocurve
