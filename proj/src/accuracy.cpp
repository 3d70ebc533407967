#include <algorithm>
#include <cmath>
#include <map>

#include "hocurve/accuracy.hpp"
#include "hocurve/quadrature.hpp"

namespace hocurve {

namespace {

// per-face accumulation; faces are independent, so the parallel loop writes
// one row each and the merge below runs serially in face order
struct FaceRow {
  int surface = -1;
  double area = 0.0;
  double s1 = 0.0;  // integral of the distance
  double s2 = 0.0;  // integral of the squared distance
  double best = -1.0;
  std::array<double, 3> best_bary{};
  Vec3 best_point = Vec3::Zero();
};

}  // namespace

AccuracyReport measure_accuracy(const HighOrderMesh& mesh, const GeometryModel& model,
                                const BoundaryClassification& classification, int exactness,
                                int subdivision_level) {
  if (exactness <= 0) exactness = std::max(2 * mesh.degree + 2, 12);
  if (subdivision_level < 0 || subdivision_level > 10)
    throw InvalidInputError("subdivision level must be in [0, 10]");

  std::vector<int> faces;
  std::vector<int> surface_of;
  for (int f = 0; f < static_cast<int>(mesh.boundary.size()); ++f) {
    const auto& face = mesh.boundary[f];
    if (classification.classify(face.mark) != BoundaryClassification::Class::Wall) continue;
    faces.push_back(f);
    surface_of.push_back(model.surface_for_mark(face.mark));
  }
  if (faces.empty()) throw InvalidInputError("accuracy needs at least one wall face");

  const ReferenceSimplex& ref = shared_reference(2, mesh.degree);
  const int nn = ref.node_count;
  const QuadratureRule rule = quadrature(2, exactness);
  const TabulatedBasis qb = tabulate_basis(ref, rule.points_bary);

  // extra max-only samples: the face's own nodes plus a dyadic lattice
  const Eigen::MatrixXd lattice = lattice_points(2, 1 << subdivision_level);
  Eigen::MatrixXd extra(ref.nodes_bary.rows() + lattice.rows(), 3);
  extra << ref.nodes_bary, lattice;
  const TabulatedBasis sb = tabulate_basis(ref, extra);

  std::vector<FaceRow> rows(faces.size());
  parallel_for(faces.size(), [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd X(nn, 3);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& face = mesh.boundary[faces[i]];
      for (int k = 0; k < nn; ++k) X.row(k) = mesh.nodes[face.nodes[k]].transpose();
      FaceRow& row = rows[i];
      row.surface = surface_of[i];

      for (int q = 0; q < rule.weights.size(); ++q) {
        const Vec3 x = (qb.N.row(q) * X).transpose();
        const Vec3 t1 = (qb.dN[0].row(q) * X).transpose();
        const Vec3 t2 = (qb.dN[1].row(q) * X).transpose();
        const double da = t1.cross(t2).norm();
        const double dist = (x - project_to_virtual_surface(model, row.surface, x)).norm();
        const double w = rule.weights[q] * da;
        row.area += w;
        row.s1 += w * dist;
        row.s2 += w * dist * dist;
        if (dist > row.best) {
          row.best = dist;
          for (int c = 0; c < 3; ++c) row.best_bary[c] = rule.points_bary(q, c);
          row.best_point = x;
        }
      }
      for (int s = 0; s < extra.rows(); ++s) {
        const Vec3 x = (sb.N.row(s) * X).transpose();
        const double dist = (x - project_to_virtual_surface(model, row.surface, x)).norm();
        if (dist > row.best) {
          row.best = dist;
          for (int c = 0; c < 3; ++c) row.best_bary[c] = extra(s, c);
          row.best_point = x;
        }
      }
    }
  });

  AccuracyReport rep;
  std::map<int, AccuracyReport::SurfaceRow> by_surface;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const FaceRow& row = rows[i];
    rep.wall_area += row.area;
    s1 += row.s1;
    s2 += row.s2;
    if (row.best > rep.worst.distance || rep.worst.face < 0) {
      rep.worst = {faces[i], row.best_point, row.best_bary, row.best};
    }
    auto& srow = by_surface[row.surface];
    srow.surface = row.surface;
    srow.area += row.area;
    srow.sc += row.s1;
    srow.d2 += row.s2;
    srow.dinf = std::max(srow.dinf, row.best);
  }
  if (!(rep.wall_area > 0.0)) throw InvalidInputError("wall boundary has zero area");

  rep.sc = s1 / rep.wall_area;
  rep.d2 = std::sqrt(s2 / rep.wall_area);
  rep.dinf = rep.worst.distance;
  for (auto& [id, srow] : by_surface) {
    srow.sc /= srow.area;
    srow.d2 = std::sqrt(srow.d2 / srow.area);
    rep.per_surface.push_back(srow);
  }
  if (mesh.ell_c > 0.0) {
    rep.sc_rel = rep.sc / mesh.ell_c;
    rep.d2_rel = rep.d2 / mesh.ell_c;
    rep.dinf_rel = rep.dinf / mesh.ell_c;
  }
  return rep;
}

double sc_measure(const HighOrderMesh& mesh, const GeometryModel& model,
                  const BoundaryClassification& classification) {
  return measure_accuracy(mesh, model, classification).sc;
}

double d2_measure(const HighOrderMesh& mesh, const GeometryModel& model,
                  const BoundaryClassification& classification) {
  return measure_accuracy(mesh, model, classification).d2;
}

std::pair<double, DinfSample> dinf_measure(const HighOrderMesh& mesh, const GeometryModel& model,
                                           const BoundaryClassification& classification) {
  AccuracyReport rep = measure_accuracy(mesh, model, classification);
  return {rep.dinf, rep.worst};
}

double face_normal_variation(const HighOrderMesh& mesh, int face, int n) {
  if (face < 0 || face >= static_cast<int>(mesh.boundary.size()))
    throw InvalidInputError("boundary face index out of range");
  if (n < 1) throw InvalidInputError("subdivision count must be positive");

  const ReferenceSimplex& ref = shared_reference(2, mesh.degree);
  const int nn = ref.node_count;
  const SubdivisionGrid grid = subdivide_reference(2, n);
  const TabulatedBasis tb = tabulate_basis(ref, grid.points_bary);

  Eigen::MatrixXd X(nn, 3);
  for (int k = 0; k < nn; ++k) X.row(k) = mesh.nodes[mesh.boundary[face].nodes[k]].transpose();

  const int npts = static_cast<int>(grid.points_bary.rows());
  Eigen::MatrixXd normals(npts, 3), points(npts, 3);
  for (int s = 0; s < npts; ++s) {
    points.row(s) = tb.N.row(s) * X;
    const Vec3 t1 = (tb.dN[0].row(s) * X).transpose();
    const Vec3 t2 = (tb.dN[1].row(s) * X).transpose();
    normals.row(s) = t1.cross(t2).normalized().transpose();
  }

  double worst = 0.0;
  for (const auto& cell : grid.cells) {
    static const int kEdge[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& e : kEdge) {
      const int a = cell[e[0]], b = cell[e[1]];
      const double dx = (points.row(a) - points.row(b)).norm();
      if (dx <= 0.0) continue;
      worst = std::max(worst, (normals.row(a) - normals.row(b)).norm() / dx);
    }
  }
  return worst;
}

double face_normal_derivative_variation(const HighOrderMesh& mesh, int face, const Vec3& axis,
                                        int lines, int samples) {
  if (face < 0 || face >= static_cast<int>(mesh.boundary.size()))
    throw InvalidInputError("boundary face index out of range");
  if (lines < 1 || samples < 3) throw InvalidInputError("need at least one line of three samples");
  const Vec3 dir = axis.normalized();

  const ReferenceSimplex& ref = shared_reference(2, mesh.degree);
  const int nn = ref.node_count;
  Eigen::MatrixXd X(nn, 3);
  for (int k = 0; k < nn; ++k) X.row(k) = mesh.nodes[mesh.boundary[face].nodes[k]].transpose();

  // corner pair with the largest span along the axis; lines run between the
  // two and are offset toward the remaining corner
  double span[3] = {X.row(0).dot(dir), X.row(1).dot(dir), X.row(2).dot(dir)};
  int a = 0, b = 1, c = 2;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(span[i] - span[j]) > std::abs(span[a] - span[b])) {
        a = i;
        b = j;
        c = 3 - i - j;
      }
  const double guard = 1e-8 * (std::abs(span[a] - span[b]) + 1e-300);

  Eigen::MatrixXd bary(samples, 3);
  double worst = 0.0;
  for (int l = 0; l < lines; ++l) {
    const double off = (l + 0.5) / lines * 0.5;  // sweep the near half of the face
    Eigen::RowVector3d from = Eigen::RowVector3d::Zero(), to = Eigen::RowVector3d::Zero();
    from(a) = 1.0 - off;
    from(c) = off;
    to(b) = 1.0 - off;
    to(c) = off;
    for (int s = 0; s < samples; ++s) {
      const double t = static_cast<double>(s) / (samples - 1);
      bary.row(s) = (1.0 - t) * from + t * to;
    }
    const TabulatedBasis tb = tabulate_basis(ref, bary);
    std::vector<double> g;
    double prev_w = 0.0, prev_z = 0.0;
    for (int s = 0; s < samples; ++s) {
      const Vec3 x = (tb.N.row(s) * X).transpose();
      const Vec3 t1 = (tb.dN[0].row(s) * X).transpose();
      const Vec3 t2 = (tb.dN[1].row(s) * X).transpose();
      const double w = t1.cross(t2).normalized().dot(dir);
      const double z = x.dot(dir);
      if (s > 0 && std::abs(z - prev_z) > guard) g.push_back((w - prev_w) / (z - prev_z));
      prev_w = w;
      prev_z = z;
    }
    double tv = 0.0;
    for (std::size_t s = 1; s < g.size(); ++s) tv += std::abs(g[s] - g[s - 1]);
    worst = std::max(worst, tv);
  }
  return worst;
}

}  // namespace hocurve
