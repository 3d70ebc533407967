#include "hocurve/objective.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "hocurve/reference.hpp"

namespace hocurve {

namespace {

std::size_t slot_count(std::size_t n) { return (n + kParallelChunk - 1) / kParallelChunk; }

// parallel_for hands the body exactly one kParallelChunk-wide range, so
// begin / kParallelChunk indexes a private partial-sum slot; merging the
// slots in index order keeps every reduction bitwise thread-count-free.
std::size_t slot_of(std::size_t begin) { return begin / kParallelChunk; }

double merge(const std::vector<double>& partial) {
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

double mesh_energy(const HighOrderMesh& mesh, const QuadratureRule& rule, double delta) {
  const ReferenceSimplex& ref = shared_reference(3, mesh.degree);
  const TabulatedBasis tab = tabulate_basis(ref, rule.points_bary);
  const int nq = static_cast<int>(rule.weights.size());
  const int nn = ref.node_count;
  std::vector<Eigen::MatrixXd> g0(nq, Eigen::MatrixXd(nn, 3));
  for (int q = 0; q < nq; ++q)
    for (int i = 0; i < nn; ++i)
      for (int k = 0; k < 3; ++k) g0[q](i, k) = tab.dN[k](q, i);

  const std::size_t ne = mesh.elems.size();
  std::vector<double> partial(slot_count(ne), 0.0);
  std::vector<char> poisoned(slot_count(ne), 0);
  parallel_for(ne, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd X(nn, 3);
    double acc = 0.0;
    bool bad = false;
    for (std::size_t e = begin; e < end && !bad; ++e) {
      const auto& el = mesh.elems[e];
      for (int i = 0; i < nn; ++i) X.row(i) = mesh.nodes[el[i]].transpose();
      const Mat3 JI = initial_jacobian(mesh, static_cast<int>(e));
      const Mat3 JIinv = JI.inverse();
      const double jdet = JI.determinant();
      for (int q = 0; q < nq; ++q) {
        const Mat3 A = (X.transpose() * g0[q]) * JIinv;
        const EtaKernel k = eta_kernel(A, delta);
        if (!k.valid) {
          bad = true;
          break;
        }
        acc += rule.weights[q] * jdet * k.eta2();
      }
    }
    partial[slot_of(begin)] = acc;
    if (bad) poisoned[slot_of(begin)] = 1;
  });
  for (char bad : poisoned)
    if (bad) return kInvalid;
  return merge(partial);
}

PenaltyProblem::PenaltyProblem(HighOrderMesh& mesh, const GeometryModel& model, NodeTargets targets,
                               int volume_exactness, double delta)
    : mesh_(&mesh),
      model_(&model),
      targets_(std::move(targets)),
      delta_(delta),
      rule_(quadrature(3, volume_exactness)),
      face_rule_(quadrature(2, 2 * mesh.degree + 2)) {
  if (targets_.node.size() != mesh.nodes.size())
    throw InvalidInputError("node target list does not match the mesh node count");

  const ReferenceSimplex& ref = shared_reference(3, mesh.degree);
  const TabulatedBasis tab = tabulate_basis(ref, rule_.points_bary);
  const int nq = static_cast<int>(rule_.weights.size());
  const int nn = ref.node_count;
  g0_.assign(nq, Eigen::MatrixXd(nn, 3));
  for (int q = 0; q < nq; ++q)
    for (int i = 0; i < nn; ++i)
      for (int k = 0; k < 3; ++k) g0_[q](i, k) = tab.dN[k](q, i);

  const ReferenceSimplex& tri = shared_reference(2, mesh.degree);
  const TabulatedBasis ftab = tabulate_basis(tri, face_rule_.points_bary);
  face_n_ = ftab.N;
  const int nf = tri.node_count;
  face_mass_ref_ = Eigen::MatrixXd::Zero(nf, nf);
  for (int q = 0; q < static_cast<int>(face_rule_.weights.size()); ++q)
    face_mass_ref_.noalias() +=
        face_rule_.weights[q] * (face_n_.row(q).transpose() * face_n_.row(q));

  const std::size_t ne = mesh.elems.size();
  jinv_.resize(ne);
  jdet_.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const Mat3 JI = initial_jacobian(mesh, static_cast<int>(e));
    const double det = JI.determinant();
    if (!(det > 0.0))
      throw InvalidInputError("initial element " + std::to_string(e) + " is degenerate");
    jinv_[e] = JI.inverse();
    jdet_[e] = det;
  }

  // Same chunking and inner loop shape as the energy accumulation, so the
  // normalized energy of the uncurved state is 1 to rounding.
  std::vector<double> vpart(slot_count(ne), 0.0);
  parallel_for(ne, [&](std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t e = begin; e < end; ++e)
      for (int q = 0; q < nq; ++q) acc += rule_.weights[q] * jdet_[e];
    vpart[slot_of(begin)] = acc;
  });
  volume_ = merge(vpart);
  if (!(volume_ > 0.0)) throw InvalidInputError("mesh volume is not positive");

  const std::size_t nfaces = mesh.boundary.size();
  face_double_area_.resize(nfaces);
  for (std::size_t f = 0; f < nfaces; ++f) {
    const auto& face = mesh.boundary[f];
    const Vec3& a = mesh.initial_vertices[face.nodes[0]];
    const Vec3& b = mesh.initial_vertices[face.nodes[1]];
    const Vec3& c = mesh.initial_vertices[face.nodes[2]];
    face_double_area_[f] = ((b - a).cross(c - a)).norm();
    bool live = false;
    for (int id : face.nodes)
      if (targets_.active(id)) live = true;
    if (live) live_faces_.push_back(static_cast<int>(f));
  }
  std::vector<double> apart(slot_count(nfaces), 0.0);
  parallel_for(nfaces, [&](std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t f = begin; f < end; ++f)
      for (int q = 0; q < static_cast<int>(face_rule_.weights.size()); ++q)
        acc += face_rule_.weights[q] * face_double_area_[f];
    apart[slot_of(begin)] = acc;
  });
  area_ = merge(apart);
  if (!(area_ > 0.0)) throw InvalidInputError("boundary area is not positive");

  active_index_.assign(mesh.nodes.size(), -1);
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    if (targets_.active(static_cast<int>(n))) {
      active_index_[n] = static_cast<int>(active_nodes_.size());
      active_nodes_.push_back(static_cast<int>(n));
    }
  }
  if (active_nodes_.empty()) throw InvalidInputError("every node is fixed; nothing to optimize");

  snapshot_.resize(mesh.nodes.size(), 3);
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) snapshot_.row(n) = mesh.nodes[n].transpose();
}

void PenaltyProblem::set_mu(double mu) {
  if (!(mu > 0.0)) throw InvalidInputError("penalty parameter must be positive");
  mu_ = mu;
}

Eigen::VectorXd PenaltyProblem::coords() const {
  const int na = active_count();
  Eigen::VectorXd x(3 * na);
  for (int a = 0; a < na; ++a) {
    const Vec3& p = mesh_->nodes[active_nodes_[a]];
    for (int c = 0; c < 3; ++c) x[c * na + a] = p[c];
  }
  return x;
}

void PenaltyProblem::set_coords(const Eigen::VectorXd& x) {
  const int na = active_count();
  if (x.size() != 3 * na) throw InvalidInputError("coordinate vector has the wrong length");
  for (int a = 0; a < na; ++a) {
    Vec3& p = mesh_->nodes[active_nodes_[a]];
    for (int c = 0; c < 3; ++c) p[c] = x[c * na + a];
  }
  cache_ready_ = false;
}

Eigen::MatrixXd PenaltyProblem::projected_targets() const {
  const std::size_t n = mesh_->nodes.size();
  Eigen::MatrixXd T(n, 3);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& t = targets_.node[i];
      Vec3 g = mesh_->nodes[i];
      if (t.kind == NodeTargets::Kind::Surface)
        g = project_to_virtual_surface(*model_, t.id, g);
      else if (t.kind == NodeTargets::Kind::Curve)
        g = project_to_virtual_curve(*model_, t.id, g);
      T.row(i) = g.transpose();
    }
  });
  return T;
}

void PenaltyProblem::rebuild_snapshot() { snapshot_ = projected_targets(); }

double PenaltyProblem::face_integral(const Eigen::MatrixXd& targets) const {
  const int nf = static_cast<int>(face_mass_ref_.rows());
  const std::size_t m = live_faces_.size();
  std::vector<double> partial(slot_count(m), 0.0);
  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd D(nf, 3);
    double acc = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const int f = live_faces_[k];
      const auto& face = mesh_->boundary[f];
      for (int i = 0; i < nf; ++i) {
        const int id = face.nodes[i];
        D.row(i) = mesh_->nodes[id].transpose() - targets.row(id);
      }
      acc += face_double_area_[f] * (D.transpose() * face_mass_ref_ * D).trace();
    }
    partial[slot_of(begin)] = acc;
  });
  return merge(partial);
}

double PenaltyProblem::boundary_deviation() const { return face_integral(snapshot_); }

double PenaltyProblem::fresh_boundary_error() const {
  return std::sqrt(face_integral(projected_targets()) / area_);
}

double PenaltyProblem::energy_raw() const { return mesh_energy(*mesh_, rule_, delta_); }

void PenaltyProblem::gather(int elem, Eigen::MatrixXd& X) const {
  const auto& el = mesh_->elems[elem];
  for (std::size_t i = 0; i < el.size(); ++i) X.row(i) = mesh_->nodes[el[i]].transpose();
}

double PenaltyProblem::value_only() const {
  const int nq = static_cast<int>(rule_.weights.size());
  const int nn = static_cast<int>(g0_[0].rows());
  const std::size_t ne = mesh_->elems.size();
  std::vector<double> partial(slot_count(ne), 0.0);
  std::vector<char> poisoned(slot_count(ne), 0);
  parallel_for(ne, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd X(nn, 3);
    double acc = 0.0;
    bool bad = false;
    for (std::size_t e = begin; e < end && !bad; ++e) {
      gather(static_cast<int>(e), X);
      for (int q = 0; q < nq; ++q) {
        const Mat3 A = (X.transpose() * g0_[q]) * jinv_[e];
        const EtaKernel k = eta_kernel(A, delta_);
        if (!k.valid) {
          bad = true;
          break;
        }
        acc += rule_.weights[q] * jdet_[e] * k.eta2();
      }
    }
    partial[slot_of(begin)] = acc;
    if (bad) poisoned[slot_of(begin)] = 1;
  });
  for (char bad : poisoned)
    if (bad) return kInvalid;
  return merge(partial) / volume_ + mu_ * face_integral(snapshot_) / area_;
}

ObjectiveEval PenaltyProblem::evaluate() {
  const int nq = static_cast<int>(rule_.weights.size());
  const int nn = static_cast<int>(g0_[0].rows());
  const int na = active_count();
  const std::size_t ne = mesh_->elems.size();

  cache_.assign(ne * static_cast<std::size_t>(nq), QpData{});
  std::vector<double> epart(slot_count(ne), 0.0);
  std::vector<char> poisoned(slot_count(ne), 0);
  Eigen::MatrixXd elem_grad(ne * static_cast<std::size_t>(nn), 3);

  parallel_for(ne, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd X(nn, 3), G(nn, 3);
    double acc = 0.0;
    bool bad = false;
    for (std::size_t e = begin; e < end; ++e) {
      gather(static_cast<int>(e), X);
      auto local = elem_grad.middleRows(e * nn, nn);
      local.setZero();
      for (int q = 0; q < nq; ++q) {
        const Mat3 A = (X.transpose() * g0_[q]) * jinv_[e];
        QpData& data = cache_[e * nq + q];
        data.kernel = eta_kernel(A, delta_);
        data.scale = rule_.weights[q] * jdet_[e] / volume_;
        if (!data.kernel.valid) {
          bad = true;
          break;
        }
        acc += rule_.weights[q] * jdet_[e] * data.kernel.eta2();
        G.noalias() = g0_[q] * jinv_[e];
        local.noalias() += data.scale * (G * data.kernel.P().transpose());
      }
      if (bad) break;
    }
    epart[slot_of(begin)] = acc;
    if (bad) poisoned[slot_of(begin)] = 1;
  });

  ObjectiveEval eval;
  for (char bad : poisoned)
    if (bad) {
      eval.value = kInvalid;
      eval.energy = kInvalid;
      eval.valid = false;
      eval.gradient = Eigen::VectorXd::Zero(3 * na);
      cache_ready_ = false;
      return eval;
    }

  eval.energy = merge(epart);
  eval.gradient = Eigen::VectorXd::Zero(3 * na);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& el = mesh_->elems[e];
    for (int i = 0; i < nn; ++i) {
      const int a = active_index_[el[i]];
      if (a < 0) continue;
      for (int c = 0; c < 3; ++c) eval.gradient[c * na + a] += elem_grad(e * nn + i, c);
    }
  }

  const int nfn = static_cast<int>(face_mass_ref_.rows());
  const std::size_t m = live_faces_.size();
  std::vector<double> bpart(slot_count(m), 0.0);
  Eigen::MatrixXd face_grad(m * static_cast<std::size_t>(nfn), 3);
  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd D(nfn, 3);
    double acc = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const int f = live_faces_[k];
      const auto& face = mesh_->boundary[f];
      for (int i = 0; i < nfn; ++i) {
        const int id = face.nodes[i];
        D.row(i) = mesh_->nodes[id].transpose() - snapshot_.row(id);
      }
      acc += face_double_area_[f] * (D.transpose() * face_mass_ref_ * D).trace();
      face_grad.middleRows(k * nfn, nfn).noalias() =
          (2.0 * mu_ / area_ * face_double_area_[f]) * (face_mass_ref_ * D);
    }
    bpart[slot_of(begin)] = acc;
  });
  eval.boundary = merge(bpart);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& face = mesh_->boundary[live_faces_[k]];
    for (int i = 0; i < nfn; ++i) {
      const int a = active_index_[face.nodes[i]];
      if (a < 0) continue;
      for (int c = 0; c < 3; ++c) eval.gradient[c * na + a] += face_grad(k * nfn + i, c);
    }
  }

  eval.boundary_error = std::sqrt(eval.boundary / area_);
  eval.value = eval.energy / volume_ + mu_ * eval.boundary / area_;
  eval.valid = true;
  cache_ready_ = true;
  return eval;
}

Eigen::VectorXd PenaltyProblem::hessian_vector_product(const Eigen::VectorXd& v) const {
  if (!cache_ready_)
    throw Error("second-derivative data unavailable: evaluate() a valid state first");
  const int na = active_count();
  if (v.size() != 3 * na) throw InvalidInputError("direction vector has the wrong length");
  const int nq = static_cast<int>(rule_.weights.size());
  const int nn = static_cast<int>(g0_[0].rows());
  const std::size_t ne = mesh_->elems.size();

  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(mesh_->nodes.size(), 3);
  for (int a = 0; a < na; ++a)
    for (int c = 0; c < 3; ++c) U(active_nodes_[a], c) = v[c * na + a];

  Eigen::MatrixXd elem_out(ne * static_cast<std::size_t>(nn), 3);
  parallel_for(ne, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd Ue(nn, 3), G(nn, 3);
    for (std::size_t e = begin; e < end; ++e) {
      const auto& el = mesh_->elems[e];
      for (int i = 0; i < nn; ++i) Ue.row(i) = U.row(el[i]);
      auto local = elem_out.middleRows(e * nn, nn);
      local.setZero();
      for (int q = 0; q < nq; ++q) {
        const QpData& data = cache_[e * nq + q];
        G.noalias() = g0_[q] * jinv_[e];
        const Mat3 dA = Ue.transpose() * G;
        local.noalias() += data.scale * (G * data.kernel.dP(dA).transpose());
      }
    }
  });

  Eigen::VectorXd out = Eigen::VectorXd::Zero(3 * na);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& el = mesh_->elems[e];
    for (int i = 0; i < nn; ++i) {
      const int a = active_index_[el[i]];
      if (a < 0) continue;
      for (int c = 0; c < 3; ++c) out[c * na + a] += elem_out(e * nn + i, c);
    }
  }

  const int nfn = static_cast<int>(face_mass_ref_.rows());
  const std::size_t m = live_faces_.size();
  Eigen::MatrixXd face_out(m * static_cast<std::size_t>(nfn), 3);
  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd Df(nfn, 3);
    for (std::size_t k = begin; k < end; ++k) {
      const auto& face = mesh_->boundary[live_faces_[k]];
      for (int i = 0; i < nfn; ++i) Df.row(i) = U.row(face.nodes[i]);
      face_out.middleRows(k * nfn, nfn).noalias() =
          (2.0 * mu_ / area_ * face_double_area_[live_faces_[k]]) * (face_mass_ref_ * Df);
    }
  });
  for (std::size_t k = 0; k < m; ++k) {
    const auto& face = mesh_->boundary[live_faces_[k]];
    for (int i = 0; i < nfn; ++i) {
      const int a = active_index_[face.nodes[i]];
      if (a < 0) continue;
      for (int c = 0; c < 3; ++c) out[c * na + a] += face_out(k * nfn + i, c);
    }
  }
  return out;
}

std::array<Eigen::SparseMatrix<double>, 3> PenaltyProblem::diagonal_blocks() const {
  if (!cache_ready_)
    throw Error("second-derivative data unavailable: evaluate() a valid state first");
  const int nq = static_cast<int>(rule_.weights.size());
  const int nn = static_cast<int>(g0_[0].rows());
  const int na = active_count();
  const std::size_t ne = mesh_->elems.size();

  // per element, three nn x nn blocks stacked along rows
  Eigen::MatrixXd blocks(ne * static_cast<std::size_t>(3 * nn), nn);
  parallel_for(ne, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd G(nn, 3);
    for (std::size_t e = begin; e < end; ++e) {
      auto be = blocks.middleRows(e * (3 * nn), 3 * nn);
      be.setZero();
      for (int q = 0; q < nq; ++q) {
        const QpData& data = cache_[e * nq + q];
        G.noalias() = g0_[q] * jinv_[e];
        for (int c = 0; c < 3; ++c) {
          const Mat3 M = data.kernel.diag_block(c);
          be.middleRows(c * nn, nn).noalias() += data.scale * (G * M * G.transpose());
        }
      }
    }
  });

  std::array<std::vector<Eigen::Triplet<double>>, 3> trip;
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& el = mesh_->elems[e];
    for (int c = 0; c < 3; ++c) {
      const auto be = blocks.middleRows(e * (3 * nn) + c * nn, nn);
      for (int i = 0; i < nn; ++i) {
        const int a = active_index_[el[i]];
        if (a < 0) continue;
        for (int j = 0; j < nn; ++j) {
          const int b = active_index_[el[j]];
          if (b >= 0) trip[c].emplace_back(a, b, be(i, j));
        }
      }
    }
  }
  const int nfn = static_cast<int>(face_mass_ref_.rows());
  for (int f : live_faces_) {
    const auto& face = mesh_->boundary[f];
    const double w = 2.0 * mu_ / area_ * face_double_area_[f];
    for (int i = 0; i < nfn; ++i) {
      const int a = active_index_[face.nodes[i]];
      if (a < 0) continue;
      for (int j = 0; j < nfn; ++j) {
        const int b = active_index_[face.nodes[j]];
        if (b < 0) continue;
        for (int c = 0; c < 3; ++c) trip[c].emplace_back(a, b, w * face_mass_ref_(i, j));
      }
    }
  }

  std::array<Eigen::SparseMatrix<double>, 3> out;
  for (int c = 0; c < 3; ++c) {
    out[c].resize(na, na);
    out[c].setFromTriplets(trip[c].begin(), trip[c].end());
    out[c].makeCompressed();
  }
  return out;
}

}  // namespace hocurve
