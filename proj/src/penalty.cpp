#include <algorithm>
#include <cmath>

#include "hocurve/solver.hpp"

namespace hocurve {

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidInputError("solver config: " + what); };
  if (target_degree < 2 || target_degree > 4) fail("target degree must be 2, 3 or 4");
  if (!(eps_star > 0.0)) fail("boundary tolerance factor must be positive");
  if (!(omega_star > 0.0)) fail("residual tolerance must be positive");
  if (!(mu0 > 0.0)) fail("initial penalty parameter must be positive");
  if (!(growth > 1.0)) fail("penalty growth factor must exceed 1");
  if (max_stages < 1) fail("need at least one penalty stage");
  if (max_newton < 1) fail("need at least one Newton iteration");
  if (!(armijo_slope > 0.0 && armijo_slope < 1.0)) fail("Armijo slope must be in (0,1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) fail("backtracking factor must be in (0,1)");
  if (max_halvings < 1) fail("need at least one step halving");
  if (gmres_restart < 1 || gmres_max_iterations < 1) fail("GMRES limits must be positive");
  if (!(forcing.eta_max > 0.0 && forcing.eta_max < 1.0)) fail("forcing cap must be in (0,1)");
  if (!(forcing.theta > 0.0)) fail("forcing scale must be positive");
  if (!(forcing.gamma > 0.0)) fail("forcing exponent must be positive");
  if (!(forcing.floor > 0.0 && forcing.floor <= forcing.eta_max))
    fail("forcing floor must be positive and below the cap");
  if (tangency_threshold_deg < 0.0) fail("tangency threshold must be nonnegative");
  if (delta < 0.0) fail("distortion smoothing must be nonnegative");
  if (exactness < 0) fail("quadrature exactness override must be nonnegative");
  if (sor_sweeps < 1) fail("need at least one preconditioner sweep");
}

DegreeOutcome penalty_loop(PenaltyProblem& problem, const SolverConfig& cfg, int degree,
                           ConvergenceTrace* trace) {
  DegreeOutcome out;
  out.degree = degree;
  const double eps_len = cfg.eps_star * problem.mesh().ell_c;
  PenaltyAdapter adapter(problem);

  problem.set_mu(cfg.mu0);
  for (int s = 0; s < cfg.max_stages; ++s) {
    problem.rebuild_snapshot();  // fixed point: targets re-projected from the current trace

    StageOutcome st;
    st.stage = s;
    st.mu = problem.mu();
    st.newton = newton_solve(adapter, cfg, cfg.omega_star, trace, degree, s, problem.mu());
    st.fresh_boundary_error = problem.fresh_boundary_error();
    st.converged = st.newton.converged && st.fresh_boundary_error < eps_len;
    out.total_newton_iterations += st.newton.iterations;
    out.stages.push_back(st);
    if (st.converged) {
      out.converged = true;
      break;
    }

    if (cfg.use_mu_predictor) {
      // jump mu toward the value that would meet the boundary tolerance,
      // clamped to stay a strict but bounded increase
      const double ratio = st.fresh_boundary_error / eps_len;
      const double lo = 10.0 * problem.mu();
      const double hi = 1e6 * problem.mu();
      problem.set_mu(std::clamp(problem.mu() * ratio, lo, hi));
    } else {
      problem.set_mu(problem.mu() * cfg.growth);
    }
  }
  return out;
}

}  // namespace hocurve
