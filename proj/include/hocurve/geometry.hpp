#pragma once

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hocurve/common.hpp"

namespace hocurve {

/// Parameter-space trim rectangle. Semantics of (u, v) are patch-kind
/// specific (see SurfacePatch). An absent bound leaves that side open.
struct TrimBox {
  double u0 = -std::numeric_limits<double>::infinity();
  double u1 = std::numeric_limits<double>::infinity();
  double v0 = -std::numeric_limits<double>::infinity();
  double v1 = std::numeric_limits<double>::infinity();
  bool active() const {
    return u0 > -std::numeric_limits<double>::infinity() || u1 < std::numeric_limits<double>::infinity() ||
           v0 > -std::numeric_limits<double>::infinity() || v1 < std::numeric_limits<double>::infinity();
  }
};

/// One analytic or discrete patch. Parameterizations used by trims:
///  plane:      u, v = in-plane coordinates along (udir, vdir)
///  sphere:     u = azimuth in (-pi, pi] about `axis` from `udir`, v = polar angle from `axis` in [0, pi]
///  cylinder:   u = azimuth, v = signed height along `axis` from `origin`
///  cone:       u = azimuth, v = slant distance from the apex (>= 0)
///  torus:      u = azimuth about `axis`, v = tube angle (0 = outward equator)
///  polynomial: Bernstein tensor patch on [0,1]^2, bi-degree <= 3
///  discrete:   triangle soup; trims do not apply
struct SurfacePatch {
  enum class Kind { Plane, Sphere, Cylinder, Cone, Torus, Polynomial, Discrete };
  Kind kind = Kind::Plane;
  Vec3 origin = Vec3::Zero();   // plane origin / center / axis point / apex
  Vec3 axis = Vec3::UnitZ();    // plane normal or rotation axis (unit)
  Vec3 udir = Vec3::UnitX();    // azimuth/param reference direction (unit, orthogonal to axis)
  double radius = 0.0;          // sphere/cylinder radius, torus major radius
  double radius2 = 0.0;         // torus minor radius
  double half_angle = 0.0;      // cone half-opening angle (radians)
  int degree_u = 0, degree_v = 0;
  Eigen::MatrixXd control;      // (degree_u+1)*(degree_v+1) x 3, row-major in (i, j)
  std::vector<Vec3> tri_vertices;
  std::vector<std::array<int, 3>> triangles;
  TrimBox trim;

  /// Rebuilds the orthonormal frame (axis, udir) deterministically.
  void normalize_frame();
  /// Characteristic size (for tolerance scaling).
  double scale() const;
};

/// Closest point on the (trimmed) patch. Exact for the closed-form kinds;
/// multi-start damped Newton with dense-sampling fallback for polynomial
/// patches; exhaustive triangle search for discrete patches.
Vec3 project_to_patch(const SurfacePatch& patch, const Vec3& x);

/// Evaluates a polynomial patch (Bernstein basis) at (u, v).
Vec3 eval_polynomial_patch(const SurfacePatch& patch, double u, double v);

struct VirtualSurface {
  int id = -1;
  std::vector<SurfacePatch> patches;
};

/// Curve between two adjacent virtual surfaces; never parameterized directly.
struct VirtualCurve {
  int id = -1;
  int surface_a = -1;
  int surface_b = -1;
};

struct GeometryModel {
  std::vector<VirtualSurface> surfaces;
  std::vector<VirtualCurve> curves;
  std::map<int, int> mark_to_surface;  // boundary mark -> virtual surface id
  std::vector<int> fixed_vertices;     // declared model corners (vertex node ids)

  const VirtualSurface& surface(int id) const;          // LookupError if absent
  const VirtualCurve& curve(int id) const;              // LookupError if absent
  int surface_for_mark(int mark) const;                 // LookupError if absent
  const VirtualCurve* find_curve(int sa, int sb) const;  // nullptr if absent
  void validate() const;  // unique ids, curves reference existing surfaces
};

/// Minimum over the surface's patches; ties keep the lowest patch index.
Vec3 project_to_virtual_surface(const GeometryModel& model, int surface_id, const Vec3& x);

/// Composed-average curve projection:
/// 0.5 * (Pa(Pb(x)) + Pb(Pa(x))) for the curve's two surfaces.
Vec3 project_to_virtual_curve(const GeometryModel& model, int curve_id, const Vec3& x);

}  // namespace hocurve
