#pragma once

#include <cstdint>
#include <vector>

#include "hocurve/geometry.hpp"
#include "hocurve/mesh.hpp"

namespace hocurve {

/// Per-node movement target. Fixed nodes are excluded from the unknowns;
/// Surface/Curve nodes are penalty-driven toward their projection; Free nodes
/// (mesh interior) move unconstrained.
struct NodeTargets {
  enum class Kind : std::uint8_t { Free, Fixed, Surface, Curve };

  struct Target {
    Kind kind = Kind::Free;
    int id = -1;  // virtual surface or curve id when kind is Surface/Curve
  };

  std::vector<Target> node;        // indexed by mesh node id
  std::vector<int> fixed_corners;  // corner vertices fixed because >= 3 surfaces meet there

  bool active(int n) const { return node[n].kind != Kind::Fixed; }
};

/// Assigns exactly one target to every node. Far-field nodes, declared model
/// corners, and frozen nodes are Fixed; nodes whose faces map to one virtual
/// surface get Surface(s); nodes shared by faces of two surfaces joined by a
/// declared virtual curve get Curve(c). Throws ClassificationError for nodes
/// on two surfaces with no declared curve, or on three or more surfaces
/// without a fixed-vertex declaration.
NodeTargets classify_boundary_nodes(const HighOrderMesh& mesh, const GeometryModel& model,
                                    const BoundaryClassification& classification,
                                    const std::vector<int>& frozen_nodes = {});

}  // namespace hocurve
