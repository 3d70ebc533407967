#include "hocurve/classify.hpp"

#include <map>
#include <set>
#include <string>

namespace hocurve {

NodeTargets classify_boundary_nodes(const HighOrderMesh& mesh, const GeometryModel& model,
                                    const BoundaryClassification& classification,
                                    const std::vector<int>& frozen_nodes) {
  classification.validate_against(mesh);
  model.validate();

  const int nn = static_cast<int>(mesh.nodes.size());
  NodeTargets out;
  out.node.assign(nn, {});

  std::vector<bool> forced_fixed(nn, false);
  std::map<int, std::set<int>> surfaces_of;  // boundary node -> virtual surface ids

  for (const auto& f : mesh.boundary) {
    switch (classification.classify(f.mark)) {
      case BoundaryClassification::Class::Farfield:
        for (int n : f.nodes) forced_fixed[n] = true;
        break;
      case BoundaryClassification::Class::Wall:
      case BoundaryClassification::Class::Symmetry: {
        int sid = model.surface_for_mark(f.mark);
        for (int n : f.nodes) surfaces_of[n].insert(sid);
        break;
      }
    }
  }

  for (int v : model.fixed_vertices) {
    if (v < 0 || v >= nn) throw InvalidInputError("fixed vertex id " + std::to_string(v) + " out of range");
    forced_fixed[v] = true;
  }
  for (int n : frozen_nodes) {
    if (n < 0 || n >= nn) throw InvalidInputError("frozen node id " + std::to_string(n) + " out of range");
    forced_fixed[n] = true;
  }

  for (const auto& [n, sids] : surfaces_of) {
    if (forced_fixed[n]) continue;
    if (sids.size() == 1) {
      out.node[n] = {NodeTargets::Kind::Surface, *sids.begin()};
    } else if (sids.size() == 2) {
      int a = *sids.begin(), b = *std::next(sids.begin());
      const VirtualCurve* c = model.find_curve(a, b);
      if (!c)
        throw ClassificationError("node " + std::to_string(n) + " lies on virtual surfaces " +
                                  std::to_string(a) + " and " + std::to_string(b) +
                                  " with no declared virtual curve between them");
      out.node[n] = {NodeTargets::Kind::Curve, c->id};
    } else {
      std::string list;
      for (int s : sids) list += (list.empty() ? "" : ", ") + std::to_string(s);
      throw ClassificationError("node " + std::to_string(n) + " lies on " + std::to_string(sids.size()) +
                                " virtual surfaces (" + list +
                                "); declare it in fixed_vertices to pin it as a corner");
    }
  }

  for (int n = 0; n < nn; ++n)
    if (forced_fixed[n]) out.node[n] = {NodeTargets::Kind::Fixed, -1};

  // corners: fixed vertices where three or more surfaces actually meet
  for (int v : model.fixed_vertices) {
    auto it = surfaces_of.find(v);
    if (it != surfaces_of.end() && it->second.size() >= 3) out.fixed_corners.push_back(v);
  }

  return out;
}

}  // namespace hocurve
