#pragma once

#include <string>
#include <vector>

#include "hocurve/classify.hpp"
#include "hocurve/geometry.hpp"
#include "hocurve/mesh.hpp"
#include "hocurve/objective.hpp"

namespace hocurve {

/// Quadrature exactness the optimization runs at for a given degree.
inline int solver_exactness(int degree) { return 2 * (3 * degree - 1); }

struct ForcingParams {
  double eta_max = 0.1;  // cap on the linear tolerance (also the first-iteration value)
  double theta = 1.0;
  double gamma = 1.5;
  double floor = 1e-10;
};

/// Linear-solve tolerance for the next Newton step:
/// min(eta_max, theta * (gnorm/prev_gnorm)^gamma), floored; eta_max on the
/// first iteration.
double linear_tolerance(double gnorm, double prev_gnorm, bool first, const ForcingParams& p);

struct SolverConfig {
  int target_degree = 2;         // 2..4
  double eps_star = 1e-12;       // boundary tolerance factor, scaled by ell_c
  double omega_star = 1e-8;      // gradient infinity-norm tolerance
  double mu0 = 1.0;              // first penalty parameter
  double growth = 10.0;          // penalty growth factor
  int max_stages = 30;           // penalty stages per degree
  int max_newton = 50;           // Newton iterations per stage
  double armijo_slope = 1e-4;    // sufficient-decrease constant
  double backtrack = 0.5;        // step-halving factor
  int max_halvings = 40;
  int gmres_restart = 50;
  int gmres_max_iterations = 500;
  ForcingParams forcing;
  bool freeze_problematic = true;      // keep flagged boundary faces straight
  bool continuation = true;            // optimize every degree 2..target, not just the target
  double tangency_threshold_deg = 5.0; // curve-tangency detector threshold
  bool use_mu_predictor = false;       // experimental jump prediction for mu
  double delta = 0.0;                  // distortion smoothing (0 = exact rectifier)
  int exactness = 0;                   // volume-rule override; 0 picks solver_exactness(q)
  int sor_sweeps = 2;                  // preconditioner symmetric sweeps

  void validate() const;  // throws InvalidInputError on out-of-range values
};

struct TraceRow {
  int degree = 0;
  int stage = 0;
  int iteration = 0;
  double value = 0.0;
  double grad_inf = 0.0;
  double boundary_error = 0.0;
  double mu = 0.0;
  double lin_tol = 0.0;
  int gmres_iterations = 0;
  double step = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
};

/// Boundary faces kept straight-sided: their nodes become FIXED and their
/// deviation is not penalized.
struct FrozenSet {
  std::vector<int> faces;  // indices into HighOrderMesh::boundary, any degree

  bool empty() const { return faces.empty(); }
  std::vector<int> nodes_of(const HighOrderMesh& mesh) const;
};

struct ProblematicReport {
  std::vector<int> two_curve_edge_faces;    // boundary triangles with >= 2 curve edges
  std::vector<int> multi_wall_face_elems;   // tets with >= 2 faces on marked surfaces
  struct Tangency {
    int face = -1;
    int node = -1;  // shared end of the two edges
    int curve_a = -1;
    int curve_b = -1;
    double angle_deg = 0.0;
  };
  std::vector<Tangency> tangencies;         // distinct curves meeting below the threshold
  FrozenSet frozen;                         // union of everything flagged

  bool empty() const {
    return two_curve_edge_faces.empty() && multi_wall_face_elems.empty() && tangencies.empty();
  }
};

/// Scans boundary connectivity for the configurations the optimizer cannot
/// curve cleanly: triangles with two edges on virtual curves, tets with two
/// or more faces on marked surfaces, and curve pairs meeting tangentially.
ProblematicReport detect_problematic_configurations(const HighOrderMesh& mesh,
                                                    const GeometryModel& model,
                                                    const NodeTargets& targets,
                                                    double tangency_threshold_deg = 5.0);

/// Minimization hooks Newton needs; PenaltyProblem is adapted onto this, and
/// tests may substitute model problems.
class NewtonProblem {
 public:
  virtual ~NewtonProblem() = default;
  virtual Eigen::VectorXd coords() const = 0;
  virtual void set_coords(const Eigen::VectorXd& x) = 0;
  virtual ObjectiveEval evaluate() = 0;
  virtual double value_only() const = 0;
  virtual Eigen::VectorXd hessian_vector_product(const Eigen::VectorXd& v) const = 0;
  virtual std::array<Eigen::SparseMatrix<double>, 3> diagonal_blocks() const = 0;
};

/// Adapter exposing a PenaltyProblem through the NewtonProblem hooks.
class PenaltyAdapter final : public NewtonProblem {
 public:
  explicit PenaltyAdapter(PenaltyProblem& p) : p_(&p) {}
  Eigen::VectorXd coords() const override { return p_->coords(); }
  void set_coords(const Eigen::VectorXd& x) override { p_->set_coords(x); }
  ObjectiveEval evaluate() override { return p_->evaluate(); }
  double value_only() const override { return p_->value_only(); }
  Eigen::VectorXd hessian_vector_product(const Eigen::VectorXd& v) const override {
    return p_->hessian_vector_product(v);
  }
  std::array<Eigen::SparseMatrix<double>, 3> diagonal_blocks() const override {
    return p_->diagonal_blocks();
  }

 private:
  PenaltyProblem* p_;
};

struct NewtonOutcome {
  int iterations = 0;
  bool converged = false;          // grad_inf below tolerance
  bool line_search_failed = false;
  double value = 0.0;
  double grad_inf = 0.0;
};

/// Newton iteration with GMRES directions, block-SOR preconditioning,
/// adaptive forcing terms and Armijo backtracking. Sentinel (invalid) trial
/// states are always rejected; non-descent directions fall back to the
/// preconditioned steepest descent. The degree/stage/mu labels only annotate
/// the trace.
NewtonOutcome newton_solve(NewtonProblem& problem, const SolverConfig& cfg, double tol_inf,
                           ConvergenceTrace* trace = nullptr, int degree = 0, int stage = 0,
                           double mu = 0.0);

struct StageOutcome {
  int stage = 0;
  double mu = 0.0;
  NewtonOutcome newton;
  double fresh_boundary_error = 0.0;  // against re-projected targets
  bool converged = false;             // both stopping criteria met
};

struct DegreeOutcome {
  int degree = 0;
  std::vector<StageOutcome> stages;
  bool converged = false;
  int total_newton_iterations = 0;
};

/// Penalty continuation at one degree: freeze the boundary snapshot, run
/// Newton, test the true boundary error and residual, grow mu, repeat.
DegreeOutcome penalty_loop(PenaltyProblem& problem, const SolverConfig& cfg, int degree,
                           ConvergenceTrace* trace = nullptr);

struct SolveReport {
  std::vector<DegreeOutcome> degrees;
  ConvergenceTrace trace;
  ProblematicReport problematic;
  bool converged = false;
  double final_boundary_error = 0.0;  // length units
  double final_grad_inf = 0.0;
  double ell_c = 0.0;
  std::vector<int> invalid_elements;  // nonpositive scaled Jacobian after curving
};

struct CurvingResult {
  HighOrderMesh mesh;
  SolveReport report;
};

/// Full driver: validate input, detect and optionally freeze problematic
/// boundary configurations, then curve through degrees 2..target, each degree
/// elevating the previous optimized mesh.
CurvingResult curve_mesh(const LinearMesh& linear, const GeometryModel& model,
                         const BoundaryClassification& classification, const SolverConfig& cfg);

}  // namespace hocurve
