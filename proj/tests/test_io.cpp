#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "hocurve/config.hpp"
#include "hocurve/io.hpp"
#include "hocurve/report.hpp"
#include "json.hpp"

using namespace hocurve;
using namespace hocurve::testing;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BoundaryClassification box_classification() {
  BoundaryClassification cls;
  cls.wall = {1, 3, 5};
  cls.symmetry = {2};
  cls.farfield = {4, 6};
  return cls;
}

}  // namespace

TEST_CASE("curved mesh round trip is bitwise") {
  HighOrderMesh mesh = elevated(box_mesh(2, 2, 2), 3);
  warp_nodes(mesh, 3, 0.04, 7);
  const BoundaryClassification cls = box_classification();
  const std::string path = temp_path("roundtrip_q3.msh");
  write_curved_mesh(mesh, path, &cls);

  HighOrderMesh back = read_curved_mesh(path);
  CHECK(back.degree == mesh.degree);
  CHECK(back.vertex_count == mesh.vertex_count);
  // the reader derives ell_c from the corner vertices it just read
  Vec3 lo = mesh.nodes[0], hi = mesh.nodes[0];
  for (int i = 0; i < mesh.vertex_count; ++i) {
    lo = lo.cwiseMin(mesh.nodes[i]);
    hi = hi.cwiseMax(mesh.nodes[i]);
  }
  CHECK(back.ell_c == doctest::Approx((hi - lo).norm()).epsilon(1e-15));
  REQUIRE(back.nodes.size() == mesh.nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) CHECK(back.nodes[i] == mesh.nodes[i]);
  REQUIRE(back.elems.size() == mesh.elems.size());
  for (std::size_t e = 0; e < mesh.elems.size(); ++e) CHECK(back.elems[e] == mesh.elems[e]);
  REQUIRE(back.boundary.size() == mesh.boundary.size());
  for (std::size_t f = 0; f < mesh.boundary.size(); ++f) {
    CHECK(back.boundary[f].nodes == mesh.boundary[f].nodes);
    CHECK(back.boundary[f].mark == mesh.boundary[f].mark);
    CHECK(back.boundary[f].adjacent_elem == mesh.boundary[f].adjacent_elem);
  }
  std::remove(path.c_str());
}

TEST_CASE("linear mesh round trip") {
  LinearMesh lin = box_mesh(2, 1, 1);
  const std::string path = temp_path("roundtrip_lin.msh");
  write_curved_mesh(from_linear(lin), path);
  LinearMesh back = read_linear_mesh(path);
  REQUIRE(back.vertices.size() == lin.vertices.size());
  for (std::size_t i = 0; i < lin.vertices.size(); ++i) CHECK(back.vertices[i] == lin.vertices[i]);
  CHECK(back.tets == lin.tets);
  REQUIRE(back.boundary.size() == lin.boundary.size());
  for (std::size_t f = 0; f < lin.boundary.size(); ++f) {
    CHECK(back.boundary[f].v == lin.boundary[f].v);
    CHECK(back.boundary[f].mark == lin.boundary[f].mark);
  }
  std::remove(path.c_str());
}

TEST_CASE("version 2.2 files load with physical tags as marks") {
  const std::string path = temp_path("single22.msh");
  write_text(path,
             "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
             "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
             "$Elements\n5\n"
             "1 2 2 7 101 1 3 2\n"
             "2 2 2 8 102 1 2 4\n"
             "3 2 2 8 103 1 4 3\n"
             "4 2 2 9 104 2 3 4\n"
             "5 4 2 1 201 1 2 3 4\n"
             "$EndElements\n");
  LinearMesh mesh = read_linear_mesh(path);
  CHECK(mesh.vertices.size() == 4);
  CHECK(mesh.tets.size() == 1);
  REQUIRE(mesh.boundary.size() == 4);
  CHECK(mesh.boundary[0].mark == 7);
  CHECK(mesh.boundary[1].mark == 8);
  CHECK(mesh.boundary[2].mark == 8);
  CHECK(mesh.boundary[3].mark == 9);
  std::remove(path.c_str());
}

TEST_CASE("malformed files report the offending line") {
  const std::string path = temp_path("bad.msh");

  SUBCASE("hexahedron") {
    write_text(path,
               "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
               "$Nodes\n8\n1 0 0 0\n2 1 0 0\n3 1 1 0\n4 0 1 0\n"
               "5 0 0 1\n6 1 0 1\n7 1 1 1\n8 0 1 1\n$EndNodes\n"
               "$Elements\n1\n1 5 2 1 1 1 2 3 4 5 6 7 8\n$EndElements\n");
    try {
      read_linear_mesh(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":17:") != std::string::npos);
      CHECK(std::string(e.what()).find("unsupported element type 5") != std::string::npos);
    }
  }
  SUBCASE("undefined node reference") {
    write_text(path,
               "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
               "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
               "$Elements\n2\n1 4 2 1 1 1 2 3 9\n2 2 2 1 1 1 3 2\n$EndElements\n");
    CHECK_THROWS_AS(read_linear_mesh(path), ParseError);
  }
  SUBCASE("unreferenced node") {
    write_text(path,
               "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
               "$Nodes\n5\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n5 9 9 9\n$EndNodes\n"
               "$Elements\n5\n"
               "1 2 2 7 1 1 3 2\n2 2 2 8 1 1 2 4\n3 2 2 8 1 1 4 3\n4 2 2 9 1 2 3 4\n"
               "5 4 2 1 1 1 2 3 4\n$EndElements\n");
    try {
      read_linear_mesh(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":10:") != std::string::npos);
      CHECK(std::string(e.what()).find("not referenced") != std::string::npos);
    }
  }
  SUBCASE("high-order content in a linear read") {
    const std::string q2 = temp_path("q2.msh");
    write_curved_mesh(elevated(single_tet(), 2), q2);
    CHECK_THROWS_AS(read_linear_mesh(q2), ParseError);
    std::remove(q2.c_str());
  }
  SUBCASE("truncated section") {
    write_text(path, "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n$Nodes\n1 1 1 1\n");
    CHECK_THROWS_AS(read_linear_mesh(path), ParseError);
  }
  std::remove(path.c_str());
}

TEST_CASE("boundary class groups are written and named") {
  HighOrderMesh mesh = elevated(box_mesh(1, 1, 1), 2);
  const BoundaryClassification cls = box_classification();
  const std::string path = temp_path("groups.msh");
  write_curved_mesh(mesh, path, &cls);
  const std::string text = read_text(path);
  CHECK(text.find("\"wall\"") != std::string::npos);
  CHECK(text.find("\"symmetry\"") != std::string::npos);
  CHECK(text.find("\"farfield\"") != std::string::npos);
  for (int m = 1; m <= 6; ++m)
    CHECK(text.find("\"mark_" + std::to_string(m) + "\"") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("degree-2 node ordering matches the documented table") {
  // independent statement of docs/node-ordering.md for one q=2 tet: corners
  // in vertex order, then the six edge midpoints in fixed edge order
  HighOrderMesh mesh = elevated(single_tet(), 2);
  const std::string path = temp_path("ordering.msh");
  write_curved_mesh(mesh, path);
  const std::string text = read_text(path);

  // parse the $Nodes coordinates (tags are sequential 1..N)
  std::vector<Vec3> coords;
  {
    std::istringstream in(text.substr(text.find("$Nodes")));
    std::string line;
    std::getline(in, line);  // $Nodes
    std::getline(in, line);  // header
    std::getline(in, line);  // block header
    long n = 10;
    for (long i = 0; i < n; ++i) std::getline(in, line);  // tags
    for (long i = 0; i < n; ++i) {
      std::getline(in, line);
      std::istringstream ls(line);
      Vec3 x;
      ls >> x.x() >> x.y() >> x.z();
      coords.push_back(x);
    }
  }
  // find the tet element line (type 11 block of one element)
  std::vector<int> tet_nodes;
  {
    const std::size_t pos = text.find(" 11 1\n");
    REQUIRE(pos != std::string::npos);
    std::istringstream in(text.substr(text.find('\n', pos) + 1));
    long tag;
    in >> tag;
    for (int k = 0; k < 10; ++k) {
      int nid;
      in >> nid;
      tet_nodes.push_back(nid - 1);
    }
  }
  const Vec3 v[4] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const int edges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (int k = 0; k < 4; ++k) CHECK(coords[tet_nodes[k]] == v[k]);
  for (int e = 0; e < 6; ++e) {
    const Vec3 mid = 0.5 * (v[edges[e][0]] + v[edges[e][1]]);
    CHECK((coords[tet_nodes[4 + e]] - mid).norm() == 0.0);
  }
  std::remove(path.c_str());
}

TEST_CASE("geometry model JSON round trip") {
  GeometryModel model;
  VirtualSurface s1;
  s1.id = 4;
  SurfacePatch plane;
  plane.kind = SurfacePatch::Kind::Plane;
  plane.origin = Vec3(0.5, -1, 2);
  plane.axis = Vec3(1, 2, 2).normalized();
  plane.normalize_frame();
  SurfacePatch sphere;
  sphere.kind = SurfacePatch::Kind::Sphere;
  sphere.origin = Vec3(0, 0.25, -1);
  sphere.axis = Vec3::UnitZ();
  sphere.radius = 1.75;
  sphere.trim.v0 = 0.1;
  sphere.trim.v1 = 1.4;
  sphere.normalize_frame();
  s1.patches = {plane, sphere};
  VirtualSurface s2;
  s2.id = 9;
  SurfacePatch cyl;
  cyl.kind = SurfacePatch::Kind::Cylinder;
  cyl.origin = Vec3(1, 1, 1);
  cyl.axis = Vec3(0, 1, 0);
  cyl.radius = 0.4;
  cyl.normalize_frame();
  SurfacePatch cone;
  cone.kind = SurfacePatch::Kind::Cone;
  cone.origin = Vec3(0, 0, 3);
  cone.axis = -Vec3::UnitZ();
  cone.half_angle = 0.35;
  cone.trim.v0 = 0.2;
  cone.trim.v1 = 2.0;
  cone.normalize_frame();
  SurfacePatch torus;
  torus.kind = SurfacePatch::Kind::Torus;
  torus.origin = Vec3(2, 0, 0);
  torus.axis = Vec3::UnitX();
  torus.radius = 2.0;
  torus.radius2 = 0.3;
  torus.normalize_frame();
  SurfacePatch poly;
  poly.kind = SurfacePatch::Kind::Polynomial;
  poly.degree_u = 2;
  poly.degree_v = 1;
  poly.control.resize(6, 3);
  poly.control << 0, 0, 0, 0.5, 0, 0.2, 1, 0, 0, 0, 1, 0.1, 0.5, 1, 0.3, 1, 1, 0;
  SurfacePatch disc;
  disc.kind = SurfacePatch::Kind::Discrete;
  disc.tri_vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0.5}};
  disc.triangles = {{0, 1, 2}, {1, 3, 2}};
  s2.patches = {cyl, cone, torus, poly, disc};
  model.surfaces = {s1, s2};
  model.curves = {{100, 4, 9}};
  model.mark_to_surface = {{3, 4}, {8, 9}};
  model.fixed_vertices = {0, 12};

  const std::string path = temp_path("geometry.json");
  write_geometry(model, path);
  GeometryModel back = read_geometry(path);
  REQUIRE(back.surfaces.size() == 2);
  CHECK(back.surfaces[0].id == 4);
  CHECK(back.surfaces[1].patches.size() == 5);
  CHECK(back.curves.size() == 1);
  CHECK(back.curves[0].surface_a == 4);
  CHECK(back.mark_to_surface == model.mark_to_surface);
  CHECK(back.fixed_vertices == model.fixed_vertices);

  // projections through the round-tripped model are bitwise identical
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const Vec3 x(u(rng), u(rng), u(rng));
    for (int id : {4, 9}) {
      const Vec3 a = project_to_virtual_surface(model, id, x);
      const Vec3 b = project_to_virtual_surface(back, id, x);
      CHECK(a == b);
    }
    CHECK(project_to_virtual_curve(model, 100, x) == project_to_virtual_curve(back, 100, x));
  }
  std::remove(path.c_str());
}

TEST_CASE("classification JSON round trip and errors") {
  BoundaryClassification cls = box_classification();
  const std::string path = temp_path("classification.json");
  write_classification(cls, path);
  BoundaryClassification back = read_classification(path);
  CHECK(back.wall == cls.wall);
  CHECK(back.symmetry == cls.symmetry);
  CHECK(back.farfield == cls.farfield);

  write_text(path, "{\"wall\": [1], \"symmetry\": []}");
  CHECK_THROWS_AS(read_classification(path), ParseError);
  write_text(path, "{\"wall\": [1], \"symmetry\": [], \"farfield\": \"oops\"}");
  CHECK_THROWS_AS(read_classification(path), ParseError);
  write_text(path, "not json");
  CHECK_THROWS_AS(read_classification(path), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("config files set solver fields") {
  const std::string path = temp_path("config.toml");
  write_text(path,
             "# solver settings\n"
             "target_degree = 4\n"
             "eps_star = 1e-10  # boundary tolerance\n"
             "forcing.eta_max = 0.05\n"
             "freeze_problematic = false\n"
             "gmres_restart = 25\n");
  SolverConfig cfg = read_config(path);
  CHECK(cfg.target_degree == 4);
  CHECK(cfg.eps_star == 1e-10);
  CHECK(cfg.forcing.eta_max == 0.05);
  CHECK(cfg.freeze_problematic == false);
  CHECK(cfg.gmres_restart == 25);
  CHECK(cfg.omega_star == 1e-8);  // untouched default

  SUBCASE("write and re-read every field") {
    cfg.use_mu_predictor = true;
    cfg.delta = 1e-6;
    write_config(cfg, path);
    SolverConfig back = read_config(path);
    CHECK(back.target_degree == cfg.target_degree);
    CHECK(back.eps_star == cfg.eps_star);
    CHECK(back.forcing.eta_max == cfg.forcing.eta_max);
    CHECK(back.use_mu_predictor == cfg.use_mu_predictor);
    CHECK(back.delta == cfg.delta);
    CHECK(back.sor_sweeps == cfg.sor_sweeps);
  }
  SUBCASE("unknown key names the line") {
    write_text(path, "target_degree = 3\nnot_a_key = 1\n");
    try {
      read_config(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
      CHECK(std::string(e.what()).find("not_a_key") != std::string::npos);
    }
  }
  SUBCASE("bad value") {
    write_text(path, "eps_star = soon\n");
    CHECK_THROWS_AS(read_config(path), ParseError);
  }
  SUBCASE("out-of-range value fails validation") {
    write_text(path, "target_degree = 9\n");
    CHECK_THROWS_AS(read_config(path), InvalidInputError);
  }
  SolverConfig scratch;
  CHECK_THROWS_AS(apply_config_entry(scratch, "nope", "1"), InvalidInputError);
  std::remove(path.c_str());
}

TEST_CASE("report document and table") {
  HighOrderMesh mesh = elevated(box_mesh(2, 2, 2), 2);
  GeometryModel model;
  auto plane = [](const Vec3& o, const Vec3& n) {
    SurfacePatch p;
    p.kind = SurfacePatch::Kind::Plane;
    p.origin = o;
    p.axis = n;
    p.normalize_frame();
    return p;
  };
  model.surfaces = {{10, {plane({0, 0, 0}, {1, 0, 0})}},
                    {20, {plane({0, 0, 0}, {0, 1, 0})}},
                    {30, {plane({0, 0, 0}, {0, 0, 1})}}};
  model.mark_to_surface = {{1, 10}, {3, 20}, {5, 30}};
  BoundaryClassification cls;
  cls.wall = {1, 3, 5};
  cls.farfield = {2, 4, 6};

  SolveReport solve;
  solve.converged = true;
  solve.ell_c = mesh.ell_c;
  TraceRow row;
  row.degree = 2;
  row.stage = 1;
  row.iteration = 1;
  row.value = 1.25;
  row.grad_inf = 3e-9;
  row.boundary_error = 1e-13;
  row.mu = 10.0;
  row.lin_tol = 0.1;
  row.gmres_iterations = 4;
  row.step = 1.0;
  solve.trace.rows.push_back(row);

  CurvingReport rep = build_report(mesh, model, cls, solve, {{"curving", 1.5}}, "Y+ = 100 family");

  // straight mesh: perfect qualities, every element in the top bin
  CHECK(rep.metadata.element_count == 48);
  long sum = 0;
  for (long c : rep.shape.counts) sum += c;
  CHECK(sum == 48);
  CHECK(rep.shape.counts.back() == 48);
  CHECK(rep.scaled_jacobian.counts.back() == 48);
  CHECK(rep.shape.min_value == doctest::Approx(1.0));
  CHECK(rep.shape.min_element >= 0);
  CHECK(rep.accuracy.dinf < 1e-14);

  const std::string jpath = temp_path("report.json");
  const std::string cpath = temp_path("report.csv");
  write_report(rep, jpath, cpath);

  SUBCASE("CSV carries exactly the six accuracy labels") {
    std::istringstream in(read_text(cpath));
    std::string line;
    std::getline(in, line);
    CHECK(line == "[accuracy]");
    std::getline(in, line);
    CHECK(line == "measure,value");
    const char* expected[6] = {"SC", "SC/l_c", "d2", "d2/l_c", "dinf", "dinf/l_c"};
    for (const char* label : expected) {
      std::getline(in, line);
      CHECK(line.substr(0, line.find(',')) == label);
    }
    std::getline(in, line);
    CHECK(line.empty());
  }
  SUBCASE("JSON and CSV accuracy values agree byte for byte after formatting") {
    const auto doc = nlohmann::json::parse(read_text(jpath));
    const std::string csv = read_text(cpath);
    auto csv_value = [&](const std::string& label) {
      const std::size_t p = csv.find("\n" + label + ",");
      REQUIRE(p != std::string::npos);
      const std::size_t b = p + label.size() + 2;
      return csv.substr(b, csv.find('\n', b) - b);
    };
    CHECK(format_double(doc["accuracy"]["SC"].get<double>()) == csv_value("SC"));
    CHECK(format_double(doc["accuracy"]["d2/l_c"].get<double>()) == csv_value("d2/l_c"));
    CHECK(format_double(doc["accuracy"]["dinf"].get<double>()) == csv_value("dinf"));
  }
  SUBCASE("JSON round trip preserves the run record") {
    CurvingReport back = read_report(jpath);
    CHECK(back.metadata.element_count == rep.metadata.element_count);
    CHECK(back.metadata.yplus_label == rep.metadata.yplus_label);
    CHECK(back.shape.counts == rep.shape.counts);
    CHECK(back.shape.min_value == rep.shape.min_value);
    CHECK(back.shape.min_element == rep.shape.min_element);
    CHECK(back.accuracy.sc == rep.accuracy.sc);
    CHECK(back.accuracy.worst.face == rep.accuracy.worst.face);
    REQUIRE(back.solve.trace.rows.size() == 1);
    CHECK(back.solve.trace.rows[0].value == 1.25);
    CHECK(back.solve.trace.rows[0].gmres_iterations == 4);
    REQUIRE(back.timings.size() == 1);
    CHECK(back.timings[0].phase == "curving");
    CHECK(back.timings[0].seconds == 1.5);
  }
  SUBCASE("histogram sum is checked on load") {
    auto doc = nlohmann::ordered_json::parse(read_text(jpath));
    doc["quality"]["qS"]["counts"][0] = 5;
    write_text(jpath, doc.dump(2));
    CHECK_THROWS_AS(read_report(jpath), ParseError);
  }
  std::remove(jpath.c_str());
  std::remove(cpath.c_str());
}

TEST_CASE("visualization sub-tets sample the element map") {
  HighOrderMesh mesh = elevated(single_tet(), 2);
  warp_nodes(mesh, 2, 0.05, 13);
  const std::string path = temp_path("viz.vtu");
  write_visualization(mesh, 2, path);
  const std::string text = read_text(path);
  CHECK(text.find("NumberOfCells=\"8\"") != std::string::npos);  // level 2: 8 sub-tets
  CHECK(text.find("NumberOfPoints=\"10\"") != std::string::npos);
  CHECK(text.find("Name=\"qS\"") != std::string::npos);
  CHECK(text.find("Name=\"qSJ\"") != std::string::npos);

  // sampled coordinates equal direct evaluation of the map on the lattice
  const SubdivisionGrid grid = subdivide_reference(3, 2);
  std::istringstream in(text.substr(text.find("format=\"ascii\">\n", text.find("<Points>")) + 16));
  for (int i = 0; i < grid.points_bary.rows(); ++i) {
    Vec3 x;
    in >> x.x() >> x.y() >> x.z();
    double bary[4] = {grid.points_bary(i, 0), grid.points_bary(i, 1), grid.points_bary(i, 2),
                      grid.points_bary(i, 3)};
    const Vec3 direct = element_point(mesh, 0, bary);
    CHECK((x - direct).norm() < 1e-15);
  }

  SUBCASE("level 1 on a straight mesh reproduces the vertices") {
    HighOrderMesh straight = from_linear(single_tet());
    write_visualization(straight, 1, path);
    const std::string t1 = read_text(path);
    CHECK(t1.find("NumberOfCells=\"1\"") != std::string::npos);
    std::istringstream pin(t1.substr(t1.find("format=\"ascii\">\n", t1.find("<Points>")) + 16));
    for (int i = 0; i < 4; ++i) {
      Vec3 x;
      pin >> x.x() >> x.y() >> x.z();
      bool matches_a_vertex = false;
      for (const auto& v : straight.nodes) matches_a_vertex = matches_a_vertex || x == v;
      CHECK(matches_a_vertex);
    }
  }
  CHECK_THROWS_AS(write_visualization(mesh, 0, path), InvalidInputError);
  std::remove(path.c_str());
}
