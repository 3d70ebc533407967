#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hocurve {

struct GmresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  bool stagnated = false;  // a whole restart cycle made no progress
  double residual = 0.0;   // final preconditioned relative residual
};

/// Restarted GMRES on apply(x) = rhs with left preconditioning; convergence
/// is measured in the preconditioned norm, relative to the preconditioned
/// right-hand side. Returns the best iterate seen. The operator need not be
/// definite; a stagnated cycle sets the flag instead of looping forever.
GmresResult gmres_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                        const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& precondition,
                        const Eigen::VectorXd& rhs, double rel_tol, int restart,
                        int max_iterations);

/// Same, preconditioned by the identity.
GmresResult gmres_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                        const Eigen::VectorXd& rhs, double rel_tol, int restart,
                        int max_iterations);

/// Approximate inverse of the three per-dimension diagonal blocks: a fixed
/// number of symmetric SOR sweeps on each block, started from zero. Keeping
/// the sweep count fixed makes the preconditioner a constant linear operator,
/// as restarted GMRES requires.
class BlockSorPreconditioner {
 public:
  BlockSorPreconditioner(const std::array<Eigen::SparseMatrix<double>, 3>& blocks, int sweeps = 2,
                         double relaxation = 1.0);

  Eigen::VectorXd apply(const Eigen::VectorXd& r) const;
  int block_size() const { return n_; }

 private:
  std::array<Eigen::SparseMatrix<double, Eigen::RowMajor>, 3> blocks_;
  std::array<Eigen::VectorXd, 3> diag_;
  int n_ = 0;
  int sweeps_;
  double relaxation_;
};

}  // namespace hocurve
