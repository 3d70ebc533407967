#include <algorithm>
#include <cmath>

#include "hocurve/gmres.hpp"
#include "hocurve/solver.hpp"

namespace hocurve {

double linear_tolerance(double gnorm, double prev_gnorm, bool first, const ForcingParams& p) {
  if (first) return std::max(p.floor, p.eta_max);
  const double ratio = prev_gnorm > 0.0 ? gnorm / prev_gnorm : 1.0;
  const double t = p.theta * std::pow(ratio, p.gamma);
  return std::min(p.eta_max, std::max(p.floor, t));
}

NewtonOutcome newton_solve(NewtonProblem& problem, const SolverConfig& cfg, double tol_inf,
                           ConvergenceTrace* trace, int degree, int stage, double mu) {
  NewtonOutcome out;
  ObjectiveEval e = problem.evaluate();
  if (!e.valid)
    throw InvalidInputError("optimization started from an inverted state with an exact rectifier");

  double prev_gnorm = 0.0;
  bool first = true;
  int stalled = 0;
  for (int it = 0; it < cfg.max_newton; ++it) {
    const double ginf = e.gradient.lpNorm<Eigen::Infinity>();
    out.value = e.value;
    out.grad_inf = ginf;
    if (ginf < tol_inf) {
      out.converged = true;
      return out;
    }

    const double gnorm = e.gradient.norm();
    double lt = linear_tolerance(gnorm, prev_gnorm, first, cfg.forcing);
    // endgame cap: once a single step could reach the tolerance, solve the
    // linear system tightly enough to actually land below it (the forcing
    // ratio alone would leave the iterate stranded a few ulps of F away)
    lt = std::min(lt, std::max(cfg.forcing.floor, 0.1 * tol_inf / gnorm));
    first = false;
    prev_gnorm = gnorm;

    const BlockSorPreconditioner M(problem.diagonal_blocks(), cfg.sor_sweeps);
    GmresResult lin = gmres_solve(
        [&](const Eigen::VectorXd& v) { return problem.hessian_vector_product(v); },
        [&](const Eigen::VectorXd& v) { return M.apply(v); }, -e.gradient, lt, cfg.gmres_restart,
        cfg.gmres_max_iterations);

    Eigen::VectorXd d = lin.x;
    double gd = e.gradient.dot(d);
    if (lin.stagnated || !(gd < 0.0)) {
      d = -M.apply(e.gradient);  // preconditioned steepest descent
      gd = e.gradient.dot(d);
      if (!(gd < 0.0)) {
        d = -e.gradient;
        gd = -gnorm * gnorm;
      }
    }

    const Eigen::VectorXd x = problem.coords();
    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      problem.set_coords(x + alpha * d);
      const double f = problem.value_only();
      // sentinel states never pass the decrease test
      if (!is_invalid(f) && f <= e.value + cfg.armijo_slope * alpha * gd) {
        accepted = true;
        break;
      }
      alpha *= cfg.backtrack;
    }
    if (!accepted) {
      problem.set_coords(x);  // restore the last valid iterate
      out.line_search_failed = true;
      return out;
    }

    if (trace)
      trace->rows.push_back(
          {degree, stage, it, e.value, ginf, e.boundary_error, mu, lt, lin.iterations, alpha});
    ++out.iterations;
    const double prev_value = e.value;
    e = problem.evaluate();
    // steps whose decrease is below the resolution of F are accepted by the
    // Armijo test but make no representable progress; three in a row means
    // the iterate sits at the floating-point floor of this stage
    stalled = e.value < prev_value ? 0 : stalled + 1;
    if (stalled >= 3) break;
  }

  out.value = e.value;
  out.grad_inf = e.gradient.lpNorm<Eigen::Infinity>();
  out.converged = out.grad_inf < tol_inf;
  return out;
}

}  // namespace hocurve
