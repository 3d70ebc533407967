#include <cmath>

#include "hocurve/fixtures.hpp"
#include "hocurve/io.hpp"

namespace hocurve {

namespace {

constexpr double kPi = 3.14159265358979323846;

// diagonal through the quad's smallest global id; shared quads between
// neighboring prisms resolve identically, so the split stays conformal
void split_prism(std::array<int, 6> v, std::vector<std::array<int, 4>>& tets) {
  // rotate the smallest id to position 0 (vertical flips keep bottom/top
  // labels consistent: flipping exchanges the triangles and reverses them)
  int best = 0;
  for (int i = 1; i < 6; ++i)
    if (v[i] < v[best]) best = i;
  auto rotate_bottom = [&](int r) {
    std::array<int, 6> w = v;
    for (int i = 0; i < 3; ++i) {
      w[i] = v[(i + r) % 3];
      w[i + 3] = v[(i + r) % 3 + 3];
    }
    v = w;
  };
  if (best >= 3) {
    v = {v[3], v[5], v[4], v[0], v[2], v[1]};  // vertical flip
    best = best == 3 ? 0 : best == 4 ? 2 : 1;
  }
  rotate_bottom(best);

  // v[0] is now the smallest; its two quads take diagonals v0-v4 and v0-v5.
  // The third quad (v1, v2, v5, v4) takes the diagonal through its minimum.
  if (std::min(v[1], v[5]) < std::min(v[2], v[4])) {
    tets.push_back({v[0], v[1], v[2], v[5]});
    tets.push_back({v[0], v[1], v[5], v[4]});
    tets.push_back({v[0], v[4], v[5], v[3]});
  } else {
    tets.push_back({v[0], v[1], v[2], v[4]});
    tets.push_back({v[0], v[4], v[2], v[5]});
    tets.push_back({v[0], v[4], v[5], v[3]});
  }
}

SurfacePatch quadrant_sphere(const Vec3& center, double radius, double polar_max, int quadrant) {
  SurfacePatch p;
  p.kind = SurfacePatch::Kind::Sphere;
  p.origin = center;
  p.axis = Vec3::UnitZ();
  p.udir = Vec3::UnitX();
  p.radius = radius;
  p.trim.u0 = -kPi + quadrant * kPi / 2;
  p.trim.u1 = -kPi + (quadrant + 1) * kPi / 2;
  p.trim.v0 = 0.0;
  p.trim.v1 = polar_max;
  p.normalize_frame();
  return p;
}

SurfacePatch quadrant_cylinder(double radius, double z0, double z1, int quadrant) {
  SurfacePatch p;
  p.kind = SurfacePatch::Kind::Cylinder;
  p.origin = Vec3::Zero();
  p.axis = Vec3::UnitZ();
  p.udir = Vec3::UnitX();
  p.radius = radius;
  p.trim.u0 = -kPi + quadrant * kPi / 2;
  p.trim.u1 = -kPi + (quadrant + 1) * kPi / 2;
  p.trim.v0 = z0;
  p.trim.v1 = z1;
  p.normalize_frame();
  return p;
}

}  // namespace

void BulletParams::validate() const {
  if (!(h > 0.0) || h > 1.0) throw InvalidInputError("bullet edge length must be in (0, 1]");
  if (normal_jump_deg < 0.0 || normal_jump_deg >= 45.0)
    throw InvalidInputError("normal jump must be in [0, 45) degrees");
  if (!(cylinder_length > 0.0)) throw InvalidInputError("cylinder length must be positive");
  if (!(far_radius > 2.0 + cylinder_length))
    throw InvalidInputError("far-field radius must clear the body");
  if (shells < 0) throw InvalidInputError("shell count must be nonnegative");
}

BulletFixture make_bullet(const BulletParams& params) {
  params.validate();
  const double h = params.h;
  const double L = params.cylinder_length;
  const double jump = params.normal_jump_deg * kPi / 180.0;

  // nose sphere through the unit junction circle at z = 0 whose normal
  // there makes `jump` with the barrel normal: center (0,0,-tan), radius sec
  const double center_z = -std::tan(jump);
  const double radius = 1.0 / std::cos(jump);
  const double polar_max = std::acos(std::sin(jump));  // junction polar angle

  // straddle mode leaves a gap of one edge length around the junction circle
  // so nothing interpolates it exactly and a band of faces crosses z = 0
  const double dz = params.straddle_junction ? 0.5 * h : 0.0;
  const double theta_top =
      params.straddle_junction ? std::acos(std::min(1.0, (dz - center_z) / radius)) : polar_max;

  int m = std::max(8, static_cast<int>(std::lround(2 * kPi / h)));
  m = (m + 3) / 4 * 4;  // quadrant seams must be mesh edges
  const int nc = std::max(1, static_cast<int>(std::lround(1.0 / h)));     // cap radial
  const int nz = std::max(1, static_cast<int>(std::lround((L - dz) / h)));  // barrel axial
  const int ns = std::max(2, static_cast<int>(std::lround(radius * theta_top / h)));  // nose arc

  // profile rings from the cap rim... bottom pole first, then cap rings
  // out to the rim, barrel rings up to the junction, nose rings to the apex
  struct Ring {
    double rho, z;
    int band;  // 0 cap, 1 barrel, 2 nose (band of the strip BELOW the ring)
  };
  std::vector<Ring> rings;
  for (int i = 1; i <= nc; ++i) rings.push_back({static_cast<double>(i) / nc, -L, 0});
  for (int j = 1; j <= nz; ++j) rings.push_back({1.0, -L + (L - dz) * j / nz, 1});
  const int k0 = params.straddle_junction ? 0 : 1;  // theta_top ring only without one at z = 0
  for (int k = k0; k <= ns - 1; ++k) {
    const double theta = theta_top * (1.0 - static_cast<double>(k) / ns);
    rings.push_back({radius * std::sin(theta), radius * std::cos(theta) + center_z, 2});
  }
  const int nr = static_cast<int>(rings.size());

  // surface node layout: bottom pole, rings bottom-up, apex
  const int apex = 1 + nr * m;
  const int ns_nodes = apex + 1;
  auto ring_node = [&](int r, int j) { return 1 + r * m + ((j % m + m) % m); };

  std::vector<Vec3> surface(ns_nodes);
  surface[0] = Vec3(0, 0, -L);
  surface[apex] = Vec3(0, 0, radius + center_z);
  for (int r = 0; r < nr; ++r)
    for (int j = 0; j < m; ++j) {
      const double phi = 2 * kPi * j / m;
      surface[ring_node(r, j)] =
          Vec3(rings[r].rho * std::cos(phi), rings[r].rho * std::sin(phi), rings[r].z);
    }

  // body triangles, oriented outward from the body (= into the domain)
  struct Tri {
    std::array<int, 3> v;
    int mark;
  };
  std::vector<Tri> tris;
  auto quadrant_of = [&](int j) { return ((j % m + m) % m) / (m / 4); };
  // cap fan around the bottom pole
  for (int j = 0; j < m; ++j) tris.push_back({{0, ring_node(0, j + 1), ring_node(0, j)}, BulletFixture::kCapMark});
  // strips between consecutive rings
  for (int r = 0; r + 1 < nr; ++r) {
    const int band = rings[r + 1].band;
    for (int j = 0; j < m; ++j) {
      const int a0 = ring_node(r, j), a1 = ring_node(r, j + 1);
      const int b0 = ring_node(r + 1, j), b1 = ring_node(r + 1, j + 1);
      int mark = BulletFixture::kCapMark;
      if (band == 1) mark = BulletFixture::kCylinderMark0 + quadrant_of(j);
      if (band == 2) mark = BulletFixture::kSphereMark0 + quadrant_of(j);
      if (band == 0) {
        // cap strip: outward is -z
        tris.push_back({{a0, b1, b0}, mark});
        tris.push_back({{a0, a1, b1}, mark});
      } else {
        tris.push_back({{a0, a1, b1}, mark});
        tris.push_back({{a0, b1, b0}, mark});
      }
    }
  }
  // nose fan around the apex
  for (int j = 0; j < m; ++j)
    tris.push_back({{ring_node(nr - 1, j), ring_node(nr - 1, j + 1), apex},
                    BulletFixture::kSphereMark0 + quadrant_of(j)});

  // radial extrusion toward the far-field sphere around the body center
  const Vec3 c(0, 0, (radius + center_z - L) / 2);
  double tmax = 1.0;
  for (const auto& x : surface) tmax = std::max(tmax, params.far_radius / (x - c).norm());
  const int nshell =
      params.shells > 0
          ? params.shells
          : std::max(3, static_cast<int>(std::lround(std::log(tmax) / std::log1p(h))));

  BulletFixture fix;
  fix.mesh.vertices.resize(static_cast<std::size_t>(ns_nodes) * (nshell + 1));
  for (int s = 0; s < ns_nodes; ++s) {
    const Vec3 d = surface[s] - c;
    const double t_outer = params.far_radius / d.norm();
    for (int k = 0; k <= nshell; ++k)
      fix.mesh.vertices[static_cast<std::size_t>(k) * ns_nodes + s] =
          c + d * std::pow(t_outer, static_cast<double>(k) / nshell);
  }
  for (int k = 0; k < nshell; ++k)
    for (const auto& t : tris) {
      const int base = k * ns_nodes, top = (k + 1) * ns_nodes;
      split_prism({base + t.v[0], base + t.v[1], base + t.v[2], top + t.v[0], top + t.v[1],
                   top + t.v[2]},
                  fix.mesh.tets);
    }
  for (const auto& t : tris) fix.mesh.boundary.push_back({{t.v[0], t.v[1], t.v[2]}, t.mark});
  const int outer = nshell * ns_nodes;
  for (const auto& t : tris)
    fix.mesh.boundary.push_back(
        {{outer + t.v[0], outer + t.v[1], outer + t.v[2]}, BulletFixture::kFarMark});
  validate(fix.mesh);

  // virtual model: tangent junction keeps nose and barrel separate with an
  // interface curve; a normal jump means the pair is NOT G1 and the study
  // groups them into one virtual surface on purpose. Straddle meshes also
  // use the grouped form: with no vertex ring on the junction there is no
  // interface curve for edge nodes to follow.
  const Vec3 center(0, 0, center_z);
  const bool split_at_junction = params.normal_jump_deg == 0.0 && !params.straddle_junction;
  VirtualSurface nose;
  nose.id = BulletFixture::kNoseSurface;
  for (int q = 0; q < 4; ++q) nose.patches.push_back(quadrant_sphere(center, radius, polar_max, q));
  if (split_at_junction) {
    VirtualSurface barrel;
    barrel.id = BulletFixture::kBarrelSurface;
    for (int q = 0; q < 4; ++q) barrel.patches.push_back(quadrant_cylinder(1.0, -L, 0.0, q));
    fix.model.surfaces = {nose, barrel};
    fix.model.curves.push_back(
        {BulletFixture::kNoseBarrelCurve, BulletFixture::kNoseSurface, BulletFixture::kBarrelSurface});
    fix.model.curves.push_back(
        {BulletFixture::kBarrelCapCurve, BulletFixture::kBarrelSurface, BulletFixture::kCapSurface});
  } else {
    for (int q = 0; q < 4; ++q) nose.patches.push_back(quadrant_cylinder(1.0, -L, 0.0, q));
    fix.model.surfaces = {nose};
    fix.model.curves.push_back(
        {BulletFixture::kBarrelCapCurve, BulletFixture::kNoseSurface, BulletFixture::kCapSurface});
  }
  SurfacePatch cap;
  cap.kind = SurfacePatch::Kind::Plane;
  cap.origin = Vec3(0, 0, -L);
  cap.axis = -Vec3::UnitZ();
  cap.udir = Vec3::UnitX();
  cap.normalize_frame();
  VirtualSurface cap_surface;
  cap_surface.id = BulletFixture::kCapSurface;
  cap_surface.patches.push_back(cap);
  fix.model.surfaces.push_back(std::move(cap_surface));

  const int barrel_target = split_at_junction ? BulletFixture::kBarrelSurface : BulletFixture::kNoseSurface;
  for (int q = 0; q < 4; ++q) {
    fix.model.mark_to_surface[BulletFixture::kSphereMark0 + q] = BulletFixture::kNoseSurface;
    fix.model.mark_to_surface[BulletFixture::kCylinderMark0 + q] = barrel_target;
  }
  fix.model.mark_to_surface[BulletFixture::kCapMark] = BulletFixture::kCapSurface;
  fix.model.validate();

  for (int q = 0; q < 4; ++q) {
    fix.classification.wall.push_back(BulletFixture::kSphereMark0 + q);
    fix.classification.wall.push_back(BulletFixture::kCylinderMark0 + q);
  }
  fix.classification.wall.push_back(BulletFixture::kCapMark);
  fix.classification.farfield.push_back(BulletFixture::kFarMark);
  return fix;
}

void write_bullet(const BulletFixture& fixture, const std::string& prefix) {
  write_curved_mesh(from_linear(fixture.mesh), prefix + ".msh", &fixture.classification);
  write_geometry(fixture.model, prefix + "_geometry.json");
  write_classification(fixture.classification, prefix + "_classification.json");
}

}  // namespace hocurve
