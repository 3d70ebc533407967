#include "hocurve/distortion.hpp"
#include "hocurve/solver.hpp"

namespace hocurve {

CurvingResult curve_mesh(const LinearMesh& linear, const GeometryModel& model,
                         const BoundaryClassification& classification, const SolverConfig& cfg) {
  cfg.validate();
  model.validate();

  HighOrderMesh mesh = from_linear(linear);  // validates orientation and boundary consistency
  classification.validate_against(mesh);

  CurvingResult res;
  res.report.ell_c = mesh.ell_c;

  const NodeTargets linear_targets = classify_boundary_nodes(mesh, model, classification);
  res.report.problematic =
      detect_problematic_configurations(mesh, model, linear_targets, cfg.tangency_threshold_deg);
  const FrozenSet frozen = cfg.freeze_problematic ? res.report.problematic.frozen : FrozenSet{};

  bool all_converged = true;
  const int first_solved = cfg.continuation ? 2 : cfg.target_degree;
  for (int q = 2; q <= cfg.target_degree; ++q) {
    mesh = elevate_degree(mesh);
    if (q < first_solved) continue;  // direct mode: elevate straight to the target
    const NodeTargets targets =
        classify_boundary_nodes(mesh, model, classification, frozen.nodes_of(mesh));
    const int exact = cfg.exactness > 0 ? cfg.exactness : solver_exactness(q);
    PenaltyProblem problem(mesh, model, targets, exact, cfg.delta);
    DegreeOutcome deg = penalty_loop(problem, cfg, q, &res.report.trace);
    if (!deg.stages.empty()) {
      res.report.final_boundary_error = deg.stages.back().fresh_boundary_error;
      res.report.final_grad_inf = deg.stages.back().newton.grad_inf;
    }
    all_converged = all_converged && deg.converged;
    res.report.degrees.push_back(std::move(deg));
  }
  res.report.converged = all_converged;

  const int exact = cfg.exactness > 0 ? cfg.exactness : solver_exactness(mesh.degree);
  const QuadratureRule quality_rule = quadrature(3, exact + 4);
  for (int e = 0; e < static_cast<int>(mesh.elems.size()); ++e)
    if (element_scaled_jacobian(mesh, e, quality_rule) <= 0.0)
      res.report.invalid_elements.push_back(e);

  res.mesh = std::move(mesh);
  return res;
}

}  // namespace hocurve
