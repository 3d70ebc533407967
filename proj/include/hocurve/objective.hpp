#pragma once

#include <array>
#include <vector>

#include <Eigen/Sparse>

#include "hocurve/classify.hpp"
#include "hocurve/distortion.hpp"
#include "hocurve/geometry.hpp"
#include "hocurve/mesh.hpp"
#include "hocurve/quadrature.hpp"

namespace hocurve {

/// Distortion energy sum_e sum_q w_q det(J_I) eta^2; the kInvalid sentinel
/// when any sampled point is inverted.
double mesh_energy(const HighOrderMesh& mesh, const QuadratureRule& rule, double delta = 0.0);

struct ObjectiveEval {
  double value = 0.0;           // energy/volume + mu * boundary/area
  double energy = 0.0;          // raw distortion energy
  double boundary = 0.0;        // raw squared boundary deviation
  double boundary_error = 0.0;  // sqrt(boundary/area), in length units
  Eigen::VectorXd gradient;     // 3 * active nodes, dimension-major (x block, y block, z block)
  bool valid = true;            // false when the sentinel poisoned the energy
};

/// The penalized curving functional
///   F_mu = E(phi)/|M_I| + mu * |tr phi - g|^2 / |dM_I|
/// over the active nodal coordinates (every non-fixed node, 3 dofs each).
/// The Dirichlet snapshot g is frozen between rebuild_snapshot() calls; the
/// normalizing volume is the energy of the initial state evaluated through
/// the same quadrature path, which makes F_mu of the uncurved mesh exactly 1.
class PenaltyProblem {
 public:
  PenaltyProblem(HighOrderMesh& mesh, const GeometryModel& model, NodeTargets targets,
                 int volume_exactness, double delta = 0.0);

  HighOrderMesh& mesh() { return *mesh_; }
  const HighOrderMesh& mesh() const { return *mesh_; }
  const NodeTargets& targets() const { return targets_; }
  double delta() const { return delta_; }

  double mu() const { return mu_; }
  void set_mu(double mu);

  int active_count() const { return static_cast<int>(active_nodes_.size()); }
  const std::vector<int>& active_nodes() const { return active_nodes_; }
  double volume() const { return volume_; }
  double boundary_area() const { return area_; }

  /// Active coordinates as one dof vector (dimension-major).
  Eigen::VectorXd coords() const;
  void set_coords(const Eigen::VectorXd& x);

  /// Freezes g to the projections of the current boundary coordinates
  /// (surface/curve nodes) and the current coordinates themselves elsewhere.
  void rebuild_snapshot();
  const Eigen::MatrixXd& snapshot() const { return snapshot_; }

  /// F_mu at the current state; no derivative work, used by line searches.
  double value_only() const;

  /// Value and analytic gradient; also refreshes the second-derivative data
  /// used by hessian_vector_product and diagonal_blocks.
  ObjectiveEval evaluate();

  /// Exact directional second derivative at the last evaluate() state.
  Eigen::VectorXd hessian_vector_product(const Eigen::VectorXd& v) const;

  /// Per-dimension diagonal Hessian blocks over active nodes (the cross-
  /// dimension coupling is discarded). Symmetric by construction.
  std::array<Eigen::SparseMatrix<double>, 3> diagonal_blocks() const;

  /// Deviation against freshly projected targets (the outer convergence
  /// test); does not disturb the stored snapshot.
  double fresh_boundary_error() const;

  /// Raw integrals against the stored snapshot / at the current state.
  double boundary_deviation() const;
  double energy_raw() const;

 private:
  struct QpData {
    EtaKernel kernel;
    double scale = 0.0;  // w_q det(J_I) / volume
  };

  Eigen::MatrixXd projected_targets() const;
  double face_integral(const Eigen::MatrixXd& targets) const;
  void gather(int elem, Eigen::MatrixXd& X) const;

  HighOrderMesh* mesh_;
  const GeometryModel* model_;
  NodeTargets targets_;
  double mu_ = 1.0;
  double delta_ = 0.0;

  QuadratureRule rule_;       // volume rule
  QuadratureRule face_rule_;  // boundary rule, exactness 2q+2
  std::vector<Eigen::MatrixXd> g0_;  // per qp: nn x 3 reference basis gradients
  Eigen::MatrixXd face_n_;           // face rule tabulation, npts x nf
  Eigen::MatrixXd face_mass_ref_;    // nf x nf, sum_q w N N^T
  std::vector<Mat3> jinv_;           // per element
  std::vector<double> jdet_;         // per element
  std::vector<double> face_double_area_;
  std::vector<int> live_faces_;      // boundary faces with at least one non-fixed node
  double volume_ = 0.0;
  double area_ = 0.0;
  std::vector<int> active_nodes_;
  std::vector<int> active_index_;  // node -> active position or -1
  Eigen::MatrixXd snapshot_;       // nodes x 3

  std::vector<QpData> cache_;  // ne * nq, filled by evaluate()
  bool cache_ready_ = false;
};

}  // namespace hocurve
