#pragma once

#include "hocurve/geometry.hpp"
#include "hocurve/mesh.hpp"

namespace hocurve {

/// How the bullet fixture is generated (edge lengths, far field, the
/// sphere-cylinder normal jump in degrees). The defaults give a small mesh
/// that curves in seconds.
struct BulletParams {
  double h = 0.45;               // target surface edge length
  double normal_jump_deg = 0.0;  // 0 = tangent junction; 7 reproduces the oscillation study
  double cylinder_length = 2.0;
  double far_radius = 5.0;
  int shells = 0;                // radial layers; 0 picks one from h
  bool straddle_junction = false;  // keep vertex rings off the nose-barrel circle
                                   // so one band of faces crosses it

  void validate() const;
};

/// A complete curving problem around a bullet-shaped body: a hemisphere
/// nose (four sphere patches) on a cylinder barrel (four patches) with a
/// flat cap, immersed in a spherical far field. The nose patches form one
/// virtual surface and the barrel another when the junction is tangent;
/// with a nonzero normal jump the nose and barrel are deliberately grouped
/// into a single virtual surface whose internal normal is discontinuous.
struct BulletFixture {
  LinearMesh mesh;
  GeometryModel model;
  BoundaryClassification classification;

  // boundary marks used by the generator
  static constexpr int kSphereMark0 = 11;    // 11..14, one per nose quadrant
  static constexpr int kCylinderMark0 = 21;  // 21..24, one per barrel quadrant
  static constexpr int kCapMark = 31;
  static constexpr int kFarMark = 99;

  // virtual entity ids
  static constexpr int kNoseSurface = 1;  // sphere+cylinder when the junction is not tangent
  static constexpr int kBarrelSurface = 2;
  static constexpr int kCapSurface = 3;
  static constexpr int kNoseBarrelCurve = 101;
  static constexpr int kBarrelCapCurve = 102;
};

/// Deterministic generator (pure arithmetic, no randomness).
BulletFixture make_bullet(const BulletParams& params = {});

/// Writes mesh (MSH), geometry (JSON) and classification (JSON) under
/// `prefix` (prefix + ".msh" / "_geometry.json" / "_classification.json").
void write_bullet(const BulletFixture& fixture, const std::string& prefix);

}  // namespace hocurve
