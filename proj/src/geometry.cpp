#include "hocurve/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hocurve {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Nearest angle to `u` inside [u0, u1] under circular (2*pi) distance.
// Membership is decided modulo 2*pi, so the atan2 branch cut is immaterial.
double clamp_angle(double u, double u0, double u1) {
  if (u1 - u0 >= 2 * kPi) return u;
  double w = std::remainder(u - u0, 2 * kPi);
  if (w < 0) w += 2 * kPi;  // offset from u0, in [0, 2*pi)
  if (u0 + w <= u1) return u0 + w;
  double e = w - (u1 - u0);  // offset past u1
  double d0 = std::min(w, 2 * kPi - w);
  double d1 = std::min(e, 2 * kPi - e);
  return d0 <= d1 ? u0 : u1;
}

// Deterministic azimuth for defective queries (on the axis).
double fallback_u(const TrimBox& t) {
  if (t.u0 > -std::numeric_limits<double>::infinity() && t.u1 < std::numeric_limits<double>::infinity())
    return 0.5 * (t.u0 + t.u1);
  return 0.0;
}

struct Frame {
  Vec3 n, e1, e2;
};

Frame frame_of(const SurfacePatch& p) { return {p.axis, p.udir, p.axis.cross(p.udir)}; }

Vec3 project_plane(const SurfacePatch& p, const Vec3& x) {
  Frame f = frame_of(p);
  Vec3 d = x - p.origin;
  double u = clamp(d.dot(f.e1), p.trim.u0, p.trim.u1);
  double v = clamp(d.dot(f.e2), p.trim.v0, p.trim.v1);
  return p.origin + u * f.e1 + v * f.e2;
}

Vec3 project_sphere(const SurfacePatch& p, const Vec3& x) {
  Frame f = frame_of(p);
  Vec3 d = x - p.origin;
  double z = d.dot(f.n);
  Vec3 h = d - z * f.n;
  double rho = h.norm();
  double u = (rho > 1e-14 * p.radius) ? std::atan2(h.dot(f.e2), h.dot(f.e1)) : fallback_u(p.trim);
  u = clamp_angle(u, std::max(p.trim.u0, -2 * kPi), std::min(p.trim.u1, 2 * kPi));
  double v;
  if (d.norm() < 1e-14 * p.radius) {
    v = clamp(0.5 * kPi, std::max(p.trim.v0, 0.0), std::min(p.trim.v1, kPi));
  } else {
    // for fixed azimuth the meridian is a circle; the polar angle of the
    // query in that meridian plane is atan2(rho, z), and clamping it is the
    // exact constrained optimum along the circle
    v = clamp(std::atan2(rho, z), std::max(p.trim.v0, 0.0), std::min(p.trim.v1, kPi));
  }
  return p.origin + p.radius * (std::sin(v) * (std::cos(u) * f.e1 + std::sin(u) * f.e2) + std::cos(v) * f.n);
}

Vec3 project_cylinder(const SurfacePatch& p, const Vec3& x) {
  Frame f = frame_of(p);
  Vec3 d = x - p.origin;
  double z = d.dot(f.n);
  Vec3 h = d - z * f.n;
  double rho = h.norm();
  double u = (rho > 1e-14 * std::max(p.radius, 1.0)) ? std::atan2(h.dot(f.e2), h.dot(f.e1))
                                                     : fallback_u(p.trim);
  u = clamp_angle(u, std::max(p.trim.u0, -2 * kPi), std::min(p.trim.u1, 2 * kPi));
  double v = clamp(z, p.trim.v0, p.trim.v1);
  return p.origin + v * f.n + p.radius * (std::cos(u) * f.e1 + std::sin(u) * f.e2);
}

Vec3 project_cone(const SurfacePatch& p, const Vec3& x) {
  Frame f = frame_of(p);
  Vec3 d = x - p.origin;
  double z = d.dot(f.n);
  Vec3 h = d - z * f.n;
  double rho = h.norm();
  double u = (rho > 1e-14) ? std::atan2(h.dot(f.e2), h.dot(f.e1)) : fallback_u(p.trim);
  u = clamp_angle(u, std::max(p.trim.u0, -2 * kPi), std::min(p.trim.u1, 2 * kPi));
  // generator ray in the (rho, z) half-plane has direction (sin a, cos a);
  // v is the slant distance from the apex along that ray
  double t = rho * std::sin(p.half_angle) + z * std::cos(p.half_angle);
  t = clamp(t, std::max(p.trim.v0, 0.0), p.trim.v1);
  return p.origin + t * std::cos(p.half_angle) * f.n +
         t * std::sin(p.half_angle) * (std::cos(u) * f.e1 + std::sin(u) * f.e2);
}

Vec3 project_torus(const SurfacePatch& p, const Vec3& x) {
  Frame f = frame_of(p);
  Vec3 d = x - p.origin;
  double z = d.dot(f.n);
  Vec3 h = d - z * f.n;
  double rho = h.norm();
  double u = (rho > 1e-14 * p.radius) ? std::atan2(h.dot(f.e2), h.dot(f.e1)) : fallback_u(p.trim);
  u = clamp_angle(u, std::max(p.trim.u0, -2 * kPi), std::min(p.trim.u1, 2 * kPi));
  Vec3 rhat = std::cos(u) * f.e1 + std::sin(u) * f.e2;
  Vec3 w = x - (p.origin + p.radius * rhat);
  double wr = w.dot(rhat), wz = w.dot(f.n);
  double v = (std::hypot(wr, wz) > 1e-14 * p.radius2) ? std::atan2(wz, wr) : 0.0;
  v = clamp_angle(v, std::max(p.trim.v0, -2 * kPi), std::min(p.trim.v1, 2 * kPi));
  return p.origin + (p.radius + p.radius2 * std::cos(v)) * rhat + p.radius2 * std::sin(v) * f.n;
}

// --- polynomial patches ----------------------------------------------------

void bernstein(int deg, double t, double* b, double* db, double* d2b) {
  double s = 1 - t;
  switch (deg) {
    case 0:
      b[0] = 1;
      if (db) db[0] = 0;
      if (d2b) d2b[0] = 0;
      break;
    case 1:
      b[0] = s;
      b[1] = t;
      if (db) {
        db[0] = -1;
        db[1] = 1;
      }
      if (d2b) d2b[0] = d2b[1] = 0;
      break;
    case 2:
      b[0] = s * s;
      b[1] = 2 * s * t;
      b[2] = t * t;
      if (db) {
        db[0] = -2 * s;
        db[1] = 2 * (s - t);
        db[2] = 2 * t;
      }
      if (d2b) {
        d2b[0] = 2;
        d2b[1] = -4;
        d2b[2] = 2;
      }
      break;
    default:
      b[0] = s * s * s;
      b[1] = 3 * s * s * t;
      b[2] = 3 * s * t * t;
      b[3] = t * t * t;
      if (db) {
        db[0] = -3 * s * s;
        db[1] = 3 * s * (s - 2 * t);
        db[2] = 3 * t * (2 * s - t);
        db[3] = 3 * t * t;
      }
      if (d2b) {
        d2b[0] = 6 * s;
        d2b[1] = 6 * (t - 2 * s);
        d2b[2] = 6 * (s - 2 * t);
        d2b[3] = 6 * t;
      }
      break;
  }
}

struct PatchJet {
  Vec3 S = Vec3::Zero(), Su = Vec3::Zero(), Sv = Vec3::Zero();
  Vec3 Suu = Vec3::Zero(), Suv = Vec3::Zero(), Svv = Vec3::Zero();
};

PatchJet poly_jet(const SurfacePatch& p, double u, double v) {
  double bu[4], dbu[4], d2bu[4], bv[4], dbv[4], d2bv[4];
  bernstein(p.degree_u, u, bu, dbu, d2bu);
  bernstein(p.degree_v, v, bv, dbv, d2bv);
  PatchJet jet;
  for (int i = 0; i <= p.degree_u; ++i)
    for (int j = 0; j <= p.degree_v; ++j) {
      Vec3 P = p.control.row(i * (p.degree_v + 1) + j).transpose();
      jet.S += bu[i] * bv[j] * P;
      jet.Su += dbu[i] * bv[j] * P;
      jet.Sv += bu[i] * dbv[j] * P;
      jet.Suu += d2bu[i] * bv[j] * P;
      jet.Suv += dbu[i] * dbv[j] * P;
      jet.Svv += bu[i] * d2bv[j] * P;
    }
  return jet;
}

Vec3 project_polynomial(const SurfacePatch& p, const Vec3& x) {
  const double u0 = std::max(p.trim.u0, 0.0), u1 = std::min(p.trim.u1, 1.0);
  const double v0 = std::max(p.trim.v0, 0.0), v1 = std::min(p.trim.v1, 1.0);
  const double scale2 = p.scale() * p.scale();

  auto dist2 = [&](double u, double v) { return (eval_polynomial_patch(p, u, v) - x).squaredNorm(); };

  // damped projected Newton on f(u,v) = |S(u,v) - x|^2; returns (u, v, f)
  auto newton_from = [&](double u, double v, bool& converged) {
    double f = dist2(u, v);
    converged = false;
    for (int it = 0; it < 60; ++it) {
      PatchJet jet = poly_jet(p, u, v);
      Vec3 r = jet.S - x;
      Eigen::Vector2d g(2 * r.dot(jet.Su), 2 * r.dot(jet.Sv));
      Eigen::Matrix2d H;
      H(0, 0) = 2 * (jet.Su.dot(jet.Su) + r.dot(jet.Suu));
      H(0, 1) = H(1, 0) = 2 * (jet.Su.dot(jet.Sv) + r.dot(jet.Suv));
      H(1, 1) = 2 * (jet.Sv.dot(jet.Sv) + r.dot(jet.Svv));
      // project the gradient onto the active box constraints
      Eigen::Vector2d gp = g;
      if ((u <= u0 && g[0] > 0) || (u >= u1 && g[0] < 0)) gp[0] = 0;
      if ((v <= v0 && g[1] > 0) || (v >= v1 && g[1] < 0)) gp[1] = 0;
      if (gp.norm() < 1e-14 * std::max(scale2, 1.0)) {
        converged = true;
        break;
      }
      Eigen::Vector2d step;
      double det = H.determinant();
      if (det > 1e-18 && H(0, 0) > 0) {
        step = -H.inverse() * g;
      } else {
        step = -gp * (0.1 / std::max(gp.norm(), 1e-30));
      }
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 30; ++ls) {
        double un = clamp(u + alpha * step[0], u0, u1);
        double vn = clamp(v + alpha * step[1], v0, v1);
        double fn = dist2(un, vn);
        if (fn < f - 1e-18 * std::max(1.0, f)) {
          u = un;
          v = vn;
          f = fn;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;  // stalled
    }
    return std::array<double, 3>{u, v, f};
  };

  std::array<double, 3> best{u0, v0, std::numeric_limits<double>::infinity()};
  bool any_converged = false;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double u = u0 + (u1 - u0) * (i + 0.5) / 4.0;
      double v = v0 + (v1 - v0) * (j + 0.5) / 4.0;
      bool conv = false;
      auto r = newton_from(u, v, conv);
      any_converged = any_converged || conv;
      if (r[2] < best[2]) best = r;
    }
  // grid seed guards against basins the coarse starts miss; densify if no
  // start converged at all
  const int n = any_converged ? 48 : 200;
  std::array<double, 3> seed{u0, v0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      double u = u0 + (u1 - u0) * i / n;
      double v = v0 + (v1 - v0) * j / n;
      double f = dist2(u, v);
      if (f < seed[2]) seed = {u, v, f};
    }
  if (seed[2] < best[2]) best = seed;
  bool conv = false;
  auto r = newton_from(seed[0], seed[1], conv);
  if (r[2] < best[2]) best = r;
  return eval_polynomial_patch(p, best[0], best[1]);
}

// --- discrete patches -------------------------------------------------------

Vec3 closest_on_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x) {
  // Ericson, Real-Time Collision Detection, 5.1.5
  Vec3 ab = b - a, ac = c - a, ax = x - a;
  double d1 = ab.dot(ax), d2 = ac.dot(ax);
  if (d1 <= 0 && d2 <= 0) return a;
  Vec3 bx = x - b;
  double d3 = ab.dot(bx), d4 = ac.dot(bx);
  if (d3 >= 0 && d4 <= d3) return b;
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  Vec3 cx = x - c;
  double d5 = ab.dot(cx), d6 = ac.dot(cx);
  if (d6 >= 0 && d5 <= d6) return c;
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

Vec3 project_discrete(const SurfacePatch& p, const Vec3& x) {
  if (p.triangles.empty()) throw InvalidInputError("discrete patch has no triangles");
  Vec3 best = Vec3::Zero();
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& t : p.triangles) {
    Vec3 c = closest_on_triangle(p.tri_vertices[t[0]], p.tri_vertices[t[1]], p.tri_vertices[t[2]], x);
    double d = (c - x).squaredNorm();
    if (d < bd) {
      bd = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

void SurfacePatch::normalize_frame() {
  double an = axis.norm();
  if (an < 1e-30) throw InvalidInputError("surface patch has zero axis/normal");
  axis /= an;
  Vec3 u = udir - udir.dot(axis) * axis;
  if (u.norm() < 1e-12) {
    // deterministic orthogonal direction: smallest axis component wins
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(axis[i]) < std::abs(axis[k])) k = i;
    u = Vec3::Unit(k) - axis[k] * axis;
  }
  udir = u.normalized();
}

double SurfacePatch::scale() const {
  switch (kind) {
    case Kind::Sphere:
    case Kind::Cylinder:
      return std::max(radius, 1e-12);
    case Kind::Torus:
      return std::max(radius + radius2, 1e-12);
    case Kind::Cone: {
      double t = std::isfinite(trim.v1) ? trim.v1 : 1.0;
      return std::max(t, 1e-12);
    }
    case Kind::Polynomial: {
      Vec3 lo = control.colwise().minCoeff().transpose(), hi = control.colwise().maxCoeff().transpose();
      return std::max((hi - lo).norm(), 1e-12);
    }
    case Kind::Discrete: {
      Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
      for (const auto& v : tri_vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
      return std::max((hi - lo).norm(), 1e-12);
    }
    case Kind::Plane:
    default: {
      double u = 0, v = 0;
      if (std::isfinite(trim.u0) && std::isfinite(trim.u1)) u = trim.u1 - trim.u0;
      if (std::isfinite(trim.v0) && std::isfinite(trim.v1)) v = trim.v1 - trim.v0;
      double s = std::hypot(u, v);
      return s > 0 ? s : 1.0;
    }
  }
}

Vec3 eval_polynomial_patch(const SurfacePatch& p, double u, double v) {
  double bu[4], bv[4];
  bernstein(p.degree_u, u, bu, nullptr, nullptr);
  bernstein(p.degree_v, v, bv, nullptr, nullptr);
  Vec3 s = Vec3::Zero();
  for (int i = 0; i <= p.degree_u; ++i)
    for (int j = 0; j <= p.degree_v; ++j)
      s += bu[i] * bv[j] * Vec3(p.control.row(i * (p.degree_v + 1) + j).transpose());
  return s;
}

Vec3 project_to_patch(const SurfacePatch& patch, const Vec3& x) {
  switch (patch.kind) {
    case SurfacePatch::Kind::Plane:
      return project_plane(patch, x);
    case SurfacePatch::Kind::Sphere:
      return project_sphere(patch, x);
    case SurfacePatch::Kind::Cylinder:
      return project_cylinder(patch, x);
    case SurfacePatch::Kind::Cone:
      return project_cone(patch, x);
    case SurfacePatch::Kind::Torus:
      return project_torus(patch, x);
    case SurfacePatch::Kind::Polynomial:
      return project_polynomial(patch, x);
    case SurfacePatch::Kind::Discrete:
      return project_discrete(patch, x);
  }
  throw Error("internal: unknown patch kind");
}

const VirtualSurface& GeometryModel::surface(int id) const {
  for (const auto& s : surfaces)
    if (s.id == id) return s;
  throw LookupError("virtual surface " + std::to_string(id) + " not found");
}

const VirtualCurve& GeometryModel::curve(int id) const {
  for (const auto& c : curves)
    if (c.id == id) return c;
  throw LookupError("virtual curve " + std::to_string(id) + " not found");
}

int GeometryModel::surface_for_mark(int mark) const {
  auto it = mark_to_surface.find(mark);
  if (it == mark_to_surface.end())
    throw LookupError("boundary mark " + std::to_string(mark) + " has no virtual surface");
  return it->second;
}

const VirtualCurve* GeometryModel::find_curve(int sa, int sb) const {
  for (const auto& c : curves)
    if ((c.surface_a == sa && c.surface_b == sb) || (c.surface_a == sb && c.surface_b == sa)) return &c;
  return nullptr;
}

void GeometryModel::validate() const {
  std::set<int> sids, cids;
  for (const auto& s : surfaces) {
    if (s.patches.empty()) throw InvalidInputError("virtual surface " + std::to_string(s.id) + " has no patches");
    if (!sids.insert(s.id).second)
      throw InvalidInputError("duplicate virtual surface id " + std::to_string(s.id));
  }
  for (const auto& c : curves) {
    if (!cids.insert(c.id).second) throw InvalidInputError("duplicate virtual curve id " + std::to_string(c.id));
    if (!sids.count(c.surface_a) || !sids.count(c.surface_b))
      throw InvalidInputError("virtual curve " + std::to_string(c.id) + " references a missing surface");
    if (c.surface_a == c.surface_b)
      throw InvalidInputError("virtual curve " + std::to_string(c.id) + " joins a surface to itself");
  }
  for (const auto& [mark, sid] : mark_to_surface) {
    if (mark < 0) throw InvalidInputError("negative mark in mark map");
    if (!sids.count(sid))
      throw InvalidInputError("mark " + std::to_string(mark) + " maps to missing surface " + std::to_string(sid));
  }
}

Vec3 project_to_virtual_surface(const GeometryModel& model, int surface_id, const Vec3& x) {
  const VirtualSurface& s = model.surface(surface_id);
  Vec3 best = Vec3::Zero();
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& patch : s.patches) {
    Vec3 c = project_to_patch(patch, x);
    double d = (c - x).squaredNorm();
    if (d < bd) {  // strict: ties keep the lowest patch index
      bd = d;
      best = c;
    }
  }
  return best;
}

Vec3 project_to_virtual_curve(const GeometryModel& model, int curve_id, const Vec3& x) {
  const VirtualCurve& c = model.curve(curve_id);
  Vec3 ab = project_to_virtual_surface(model, c.surface_a, project_to_virtual_surface(model, c.surface_b, x));
  Vec3 ba = project_to_virtual_surface(model, c.surface_b, project_to_virtual_surface(model, c.surface_a, x));
  return 0.5 * (ab + ba);
}

}  // namespace hocurve
