#include <fstream>

#include "json.hpp"

#include "hocurve/io.hpp"

namespace hocurve {

namespace {

using Json = nlohmann::ordered_json;

Json load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_document(const Json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw Error("write failed for " + path);
}

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const Json& j, const std::string& path, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError(path + ": " + what + " must be a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

const char* kind_name(SurfacePatch::Kind k) {
  switch (k) {
    case SurfacePatch::Kind::Plane: return "plane";
    case SurfacePatch::Kind::Sphere: return "sphere";
    case SurfacePatch::Kind::Cylinder: return "cylinder";
    case SurfacePatch::Kind::Cone: return "cone";
    case SurfacePatch::Kind::Torus: return "torus";
    case SurfacePatch::Kind::Polynomial: return "polynomial";
    case SurfacePatch::Kind::Discrete: return "discrete";
  }
  return "plane";
}

SurfacePatch::Kind kind_from_name(const std::string& name, const std::string& path) {
  if (name == "plane") return SurfacePatch::Kind::Plane;
  if (name == "sphere") return SurfacePatch::Kind::Sphere;
  if (name == "cylinder") return SurfacePatch::Kind::Cylinder;
  if (name == "cone") return SurfacePatch::Kind::Cone;
  if (name == "torus") return SurfacePatch::Kind::Torus;
  if (name == "polynomial") return SurfacePatch::Kind::Polynomial;
  if (name == "discrete") return SurfacePatch::Kind::Discrete;
  throw ParseError(path + ": unknown patch kind '" + name + "'");
}

Json patch_to_json(const SurfacePatch& p) {
  Json j;
  j["kind"] = kind_name(p.kind);
  switch (p.kind) {
    case SurfacePatch::Kind::Plane:
      j["origin"] = vec_to_json(p.origin);
      j["axis"] = vec_to_json(p.axis);
      j["udir"] = vec_to_json(p.udir);
      break;
    case SurfacePatch::Kind::Sphere:
    case SurfacePatch::Kind::Cylinder:
      j["origin"] = vec_to_json(p.origin);
      j["axis"] = vec_to_json(p.axis);
      j["udir"] = vec_to_json(p.udir);
      j["radius"] = p.radius;
      break;
    case SurfacePatch::Kind::Cone:
      j["origin"] = vec_to_json(p.origin);
      j["axis"] = vec_to_json(p.axis);
      j["udir"] = vec_to_json(p.udir);
      j["half_angle"] = p.half_angle;
      break;
    case SurfacePatch::Kind::Torus:
      j["origin"] = vec_to_json(p.origin);
      j["axis"] = vec_to_json(p.axis);
      j["udir"] = vec_to_json(p.udir);
      j["radius"] = p.radius;
      j["radius2"] = p.radius2;
      break;
    case SurfacePatch::Kind::Polynomial: {
      j["degree_u"] = p.degree_u;
      j["degree_v"] = p.degree_v;
      Json rows = Json::array();
      for (int r = 0; r < p.control.rows(); ++r)
        rows.push_back(Json::array({p.control(r, 0), p.control(r, 1), p.control(r, 2)}));
      j["control"] = std::move(rows);
      break;
    }
    case SurfacePatch::Kind::Discrete: {
      Json verts = Json::array();
      for (const auto& v : p.tri_vertices) verts.push_back(vec_to_json(v));
      j["vertices"] = std::move(verts);
      Json tris = Json::array();
      for (const auto& t : p.triangles) tris.push_back(Json::array({t[0], t[1], t[2]}));
      j["triangles"] = std::move(tris);
      break;
    }
  }
  if (p.trim.active()) {
    Json t;
    const double inf = std::numeric_limits<double>::infinity();
    if (p.trim.u0 > -inf) t["u0"] = p.trim.u0;
    if (p.trim.u1 < inf) t["u1"] = p.trim.u1;
    if (p.trim.v0 > -inf) t["v0"] = p.trim.v0;
    if (p.trim.v1 < inf) t["v1"] = p.trim.v1;
    j["trim"] = std::move(t);
  }
  return j;
}

SurfacePatch patch_from_json(const Json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind"))
    throw ParseError(path + ": patch must be an object with a 'kind'");
  SurfacePatch p;
  p.kind = kind_from_name(j["kind"].get<std::string>(), path);
  auto need = [&](const char* key) -> const Json& {
    if (!j.contains(key))
      throw ParseError(path + ": " + std::string(kind_name(p.kind)) + " patch needs '" + key + "'");
    return j[key];
  };
  switch (p.kind) {
    case SurfacePatch::Kind::Plane:
      p.origin = vec_from_json(need("origin"), path, "origin");
      p.axis = vec_from_json(need("axis"), path, "axis");
      if (j.contains("udir")) p.udir = vec_from_json(j["udir"], path, "udir");
      break;
    case SurfacePatch::Kind::Sphere:
    case SurfacePatch::Kind::Cylinder:
      p.origin = vec_from_json(need("origin"), path, "origin");
      p.axis = vec_from_json(need("axis"), path, "axis");
      if (j.contains("udir")) p.udir = vec_from_json(j["udir"], path, "udir");
      p.radius = need("radius").get<double>();
      break;
    case SurfacePatch::Kind::Cone:
      p.origin = vec_from_json(need("origin"), path, "origin");
      p.axis = vec_from_json(need("axis"), path, "axis");
      if (j.contains("udir")) p.udir = vec_from_json(j["udir"], path, "udir");
      p.half_angle = need("half_angle").get<double>();
      break;
    case SurfacePatch::Kind::Torus:
      p.origin = vec_from_json(need("origin"), path, "origin");
      p.axis = vec_from_json(need("axis"), path, "axis");
      if (j.contains("udir")) p.udir = vec_from_json(j["udir"], path, "udir");
      p.radius = need("radius").get<double>();
      p.radius2 = need("radius2").get<double>();
      break;
    case SurfacePatch::Kind::Polynomial: {
      p.degree_u = need("degree_u").get<int>();
      p.degree_v = need("degree_v").get<int>();
      const Json& rows = need("control");
      p.control.resize(static_cast<int>(rows.size()), 3);
      for (int r = 0; r < p.control.rows(); ++r) {
        const Vec3 v = vec_from_json(rows[r], path, "control row");
        p.control.row(r) = v.transpose();
      }
      break;
    }
    case SurfacePatch::Kind::Discrete: {
      for (const auto& v : need("vertices")) p.tri_vertices.push_back(vec_from_json(v, path, "vertex"));
      for (const auto& t : need("triangles")) {
        if (!t.is_array() || t.size() != 3) throw ParseError(path + ": triangle must have 3 indices");
        p.triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
      }
      break;
    }
  }
  if (j.contains("trim")) {
    const Json& t = j["trim"];
    if (t.contains("u0")) p.trim.u0 = t["u0"].get<double>();
    if (t.contains("u1")) p.trim.u1 = t["u1"].get<double>();
    if (t.contains("v0")) p.trim.v0 = t["v0"].get<double>();
    if (t.contains("v1")) p.trim.v1 = t["v1"].get<double>();
  }
  if (p.kind != SurfacePatch::Kind::Polynomial && p.kind != SurfacePatch::Kind::Discrete)
    p.normalize_frame();
  return p;
}

}  // namespace

GeometryModel read_geometry(const std::string& path) {
  const Json doc = load_document(path);
  if (!doc.is_object()) throw ParseError(path + ": top level must be an object");
  GeometryModel model;
  for (const auto& js : doc.value("virtual_surfaces", Json::array())) {
    VirtualSurface s;
    if (!js.contains("id")) throw ParseError(path + ": virtual surface needs an 'id'");
    s.id = js["id"].get<int>();
    for (const auto& jp : js.value("patches", Json::array()))
      s.patches.push_back(patch_from_json(jp, path));
    model.surfaces.push_back(std::move(s));
  }
  for (const auto& jc : doc.value("virtual_curves", Json::array())) {
    VirtualCurve c;
    if (!jc.contains("id") || !jc.contains("surface_a") || !jc.contains("surface_b"))
      throw ParseError(path + ": virtual curve needs 'id', 'surface_a', 'surface_b'");
    c.id = jc["id"].get<int>();
    c.surface_a = jc["surface_a"].get<int>();
    c.surface_b = jc["surface_b"].get<int>();
    model.curves.push_back(c);
  }
  const Json marks = doc.value("mark_to_surface", Json::object());
  for (const auto& [key, value] : marks.items()) {
    try {
      model.mark_to_surface[std::stoi(key)] = value.get<int>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError(path + ": mark_to_surface values must be integers");
    } catch (const std::exception&) {
      throw ParseError(path + ": mark_to_surface keys must be integer marks, got '" + key + "'");
    }
  }
  for (const auto& v : doc.value("fixed_vertices", Json::array()))
    model.fixed_vertices.push_back(v.get<int>());
  model.validate();
  return model;
}

void write_geometry(const GeometryModel& model, const std::string& path) {
  Json doc;
  Json surfaces = Json::array();
  for (const auto& s : model.surfaces) {
    Json js;
    js["id"] = s.id;
    Json patches = Json::array();
    for (const auto& p : s.patches) patches.push_back(patch_to_json(p));
    js["patches"] = std::move(patches);
    surfaces.push_back(std::move(js));
  }
  doc["virtual_surfaces"] = std::move(surfaces);
  Json curves = Json::array();
  for (const auto& c : model.curves) {
    Json jc;
    jc["id"] = c.id;
    jc["surface_a"] = c.surface_a;
    jc["surface_b"] = c.surface_b;
    curves.push_back(std::move(jc));
  }
  doc["virtual_curves"] = std::move(curves);
  Json marks = Json::object();
  for (const auto& [mark, surface] : model.mark_to_surface) marks[std::to_string(mark)] = surface;
  doc["mark_to_surface"] = std::move(marks);
  doc["fixed_vertices"] = model.fixed_vertices;
  save_document(doc, path);
}

BoundaryClassification read_classification(const std::string& path) {
  const Json doc = load_document(path);
  if (!doc.is_object()) throw ParseError(path + ": top level must be an object");
  for (const auto& key : {"wall", "symmetry", "farfield"})
    if (!doc.contains(key) || !doc[key].is_array())
      throw ParseError(path + ": missing integer array '" + std::string(key) + "'");
  BoundaryClassification cls;
  try {
    cls.wall = doc["wall"].get<std::vector<int>>();
    cls.symmetry = doc["symmetry"].get<std::vector<int>>();
    cls.farfield = doc["farfield"].get<std::vector<int>>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(path + ": class arrays must contain integer marks");
  }
  return cls;
}

void write_classification(const BoundaryClassification& cls, const std::string& path) {
  Json doc;
  doc["wall"] = cls.wall;
  doc["symmetry"] = cls.symmetry;
  doc["farfield"] = cls.farfield;
  save_document(doc, path);
}

}  // namespace hocurve
