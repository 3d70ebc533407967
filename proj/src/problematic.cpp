#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hocurve/solver.hpp"

namespace hocurve {

std::vector<int> FrozenSet::nodes_of(const HighOrderMesh& mesh) const {
  std::set<int> ids;
  for (int f : faces) {
    if (f < 0 || f >= static_cast<int>(mesh.boundary.size()))
      throw InvalidInputError("frozen face index out of range");
    for (int n : mesh.boundary[f].nodes) ids.insert(n);
  }
  return {ids.begin(), ids.end()};
}

namespace {

// A straight boundary edge lies on a virtual curve when both endpoints are
// pinned to it: two CURVE nodes of the same curve, or one CURVE node and a
// declared corner (corners terminate curves). Corner-corner edges are not
// attributable to a single curve and are left alone.
int edge_curve(const NodeTargets& t, const std::set<int>& corners, int a, int b) {
  const auto& ta = t.node[a];
  const auto& tb = t.node[b];
  const bool ca = ta.kind == NodeTargets::Kind::Curve;
  const bool cb = tb.kind == NodeTargets::Kind::Curve;
  if (ca && cb && ta.id == tb.id) return ta.id;
  if (ca && !cb && corners.count(b)) return ta.id;
  if (cb && !ca && corners.count(a)) return tb.id;
  return -1;
}

}  // namespace

ProblematicReport detect_problematic_configurations(const HighOrderMesh& mesh,
                                                    const GeometryModel& model,
                                                    const NodeTargets& targets,
                                                    double tangency_threshold_deg) {
  if (targets.node.size() != mesh.nodes.size())
    throw InvalidInputError("node targets do not match the mesh");
  ProblematicReport rep;
  const std::set<int> corners(targets.fixed_corners.begin(), targets.fixed_corners.end());
  std::set<int> frozen;

  static const int kEdges[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int f = 0; f < static_cast<int>(mesh.boundary.size()); ++f) {
    const auto& face = mesh.boundary[f];
    struct CurveEdge {
      int curve;
      int a, b;
    };
    std::vector<CurveEdge> on_curve;
    for (const auto& e : kEdges) {
      const int a = face.nodes[e[0]], b = face.nodes[e[1]];
      const int c = edge_curve(targets, corners, a, b);
      if (c >= 0) on_curve.push_back({c, a, b});
    }
    if (on_curve.size() >= 2) {
      rep.two_curve_edge_faces.push_back(f);
      frozen.insert(f);
    }
    for (std::size_t i = 0; i < on_curve.size(); ++i)
      for (std::size_t j = i + 1; j < on_curve.size(); ++j) {
        if (on_curve[i].curve == on_curve[j].curve) continue;
        // the two edges of one triangle share exactly one node
        int shared = -1, pi = -1, pj = -1;
        for (int u : {on_curve[i].a, on_curve[i].b})
          for (int v : {on_curve[j].a, on_curve[j].b})
            if (u == v) shared = u;
        if (shared < 0) continue;
        pi = on_curve[i].a == shared ? on_curve[i].b : on_curve[i].a;
        pj = on_curve[j].a == shared ? on_curve[j].b : on_curve[j].a;
        const Vec3 u = (mesh.nodes[pi] - mesh.nodes[shared]).normalized();
        const Vec3 v = (mesh.nodes[pj] - mesh.nodes[shared]).normalized();
        const double angle = std::acos(std::clamp(u.dot(v), -1.0, 1.0)) * 180.0 / 3.14159265358979323846;
        if (angle < tangency_threshold_deg) {
          rep.tangencies.push_back({f, shared, on_curve[i].curve, on_curve[j].curve, angle});
          frozen.insert(f);
        }
      }
  }

  // tets presenting two or more faces to marked surfaces
  std::map<int, std::vector<int>> marked_faces_of_elem;
  for (int f = 0; f < static_cast<int>(mesh.boundary.size()); ++f) {
    const auto& face = mesh.boundary[f];
    if (model.mark_to_surface.count(face.mark))
      marked_faces_of_elem[face.adjacent_elem].push_back(f);
  }
  for (const auto& [elem, faces] : marked_faces_of_elem) {
    if (faces.size() < 2) continue;
    rep.multi_wall_face_elems.push_back(elem);
    for (int f : faces) frozen.insert(f);
  }

  rep.frozen.faces.assign(frozen.begin(), frozen.end());
  return rep;
}

}  // namespace hocurve
