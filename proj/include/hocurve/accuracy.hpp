#pragma once

#include <utility>
#include <vector>

#include "hocurve/geometry.hpp"
#include "hocurve/mesh.hpp"

namespace hocurve {

/// Sample realizing the largest boundary-to-geometry distance.
struct DinfSample {
  int face = -1;                  // boundary face index
  Vec3 point = Vec3::Zero();      // physical location on the curved face
  std::array<double, 3> bary{};   // reference coordinates on that face
  double distance = 0.0;
};

/// Geometric accuracy of the curved wall boundary against the virtual
/// model. All lengths are in mesh units; _rel values are divided by ell_c.
struct AccuracyReport {
  double sc = 0.0;    // area-averaged distance
  double d2 = 0.0;    // root-mean-square distance
  double dinf = 0.0;  // largest sampled distance
  double sc_rel = 0.0, d2_rel = 0.0, dinf_rel = 0.0;
  double wall_area = 0.0;
  DinfSample worst;

  struct SurfaceRow {
    int surface = -1;
    double area = 0.0;
    double sc = 0.0, d2 = 0.0, dinf = 0.0;
  };
  std::vector<SurfaceRow> per_surface;  // ascending virtual-surface id
};

/// Integrates the distance from every wall face to its assigned virtual
/// surface over the curved boundary. sc and d2 use a triangle rule of the
/// given exactness (0 picks max(2q+2, 12)); dinf is the maximum over that
/// rule's points, the face nodes, and a barycentric lattice of step
/// 2^-subdivision_level, so sc <= d2 <= dinf holds by construction.
/// Throws LookupError for wall faces whose mark has no surface, or marks
/// missing from the classification; InvalidInputError when no wall face
/// exists.
AccuracyReport measure_accuracy(const HighOrderMesh& mesh, const GeometryModel& model,
                                const BoundaryClassification& classification, int exactness = 0,
                                int subdivision_level = 4);

double sc_measure(const HighOrderMesh& mesh, const GeometryModel& model,
                  const BoundaryClassification& classification);
double d2_measure(const HighOrderMesh& mesh, const GeometryModel& model,
                  const BoundaryClassification& classification);
std::pair<double, DinfSample> dinf_measure(const HighOrderMesh& mesh, const GeometryModel& model,
                                           const BoundaryClassification& classification);

/// Largest finite-difference magnitude of the face unit normal,
/// max ||n_a - n_b|| / ||x_a - x_b|| over the edges of a subdivision grid
/// of the face (n sub-edges per edge). Zero for flat faces; spikes on
/// elements stretched across a G1 break of the target geometry.
double face_normal_variation(const HighOrderMesh& mesh, int face, int n = 8);

/// Total variation of the finite-difference derivative d(n . axis)/d(x . axis)
/// of the face unit normal, sampled along lines swept across the face in its
/// direction of largest axis span, maximized over the lines. A smooth patch
/// has a near-constant derivative and scores close to zero; an interpolant
/// oscillating around a normal discontinuity scores high.
double face_normal_derivative_variation(const HighOrderMesh& mesh, int face, const Vec3& axis,
                                        int lines = 4, int samples = 33);

}  // namespace hocurve
