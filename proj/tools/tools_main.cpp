#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hocurve/accuracy.hpp"
#include "hocurve/config.hpp"
#include "hocurve/fixtures.hpp"
#include "hocurve/io.hpp"
#include "hocurve/report.hpp"
#include "hocurve/solver.hpp"

namespace {

using namespace hocurve;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string stem_of(const std::string& path) {
  std::filesystem::path p(path);
  return (p.parent_path() / p.stem()).string();
}

void print_report_summary(const CurvingReport& rep) {
  std::cout << "accuracy over wall faces:\n";
  std::cout << "  SC       = " << format_double(rep.accuracy.sc) << "\n";
  std::cout << "  SC/l_c   = " << format_double(rep.accuracy.sc_rel) << "\n";
  std::cout << "  d2       = " << format_double(rep.accuracy.d2) << "\n";
  std::cout << "  d2/l_c   = " << format_double(rep.accuracy.d2_rel) << "\n";
  std::cout << "  dinf     = " << format_double(rep.accuracy.dinf) << "\n";
  std::cout << "  dinf/l_c = " << format_double(rep.accuracy.dinf_rel) << "\n";
  std::cout << "quality (" << rep.metadata.element_count << " elements):\n";
  std::cout << "  min qS  = " << format_double(rep.shape.min_value) << " (element "
            << rep.shape.min_element << "), mean qS  = " << format_double(rep.shape.mean_value)
            << "\n";
  std::cout << "  min qSJ = " << format_double(rep.scaled_jacobian.min_value) << " (element "
            << rep.scaled_jacobian.min_element
            << "), mean qSJ = " << format_double(rep.scaled_jacobian.mean_value) << "\n";
}

int run_curve(const std::string& mesh_path, const std::string& geo_path,
              const std::string& cls_path, const std::string& config_path, int degree,
              std::string out_path, std::string report_path, int viz_level,
              const std::string& yplus) {
  SolverConfig cfg;
  if (!config_path.empty()) cfg = read_config(config_path);
  if (degree > 0) cfg.target_degree = degree;
  cfg.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const LinearMesh linear = read_linear_mesh(mesh_path);
  const GeometryModel model = read_geometry(geo_path);
  const BoundaryClassification classification = read_classification(cls_path);
  std::vector<PhaseTiming> timings;
  timings.push_back({"read", seconds_since(t0)});

  std::cout << "curving " << mesh_path << " (" << linear.tets.size() << " tets) to degree "
            << cfg.target_degree << "\n";
  const auto t1 = std::chrono::steady_clock::now();
  CurvingResult result = curve_mesh(linear, model, classification, cfg);
  timings.push_back({"curve", seconds_since(t1)});

  if (out_path.empty()) out_path = stem_of(mesh_path) + "_q" + std::to_string(cfg.target_degree) + ".msh";
  if (report_path.empty()) report_path = stem_of(out_path) + "_report.json";
  const std::string csv_path = stem_of(report_path) + ".csv";

  const auto t2 = std::chrono::steady_clock::now();
  write_curved_mesh(result.mesh, out_path, &classification);
  std::cout << "wrote " << out_path << "\n";
  if (viz_level > 0) {
    const std::string viz_path = stem_of(out_path) + ".vtu";
    write_visualization(result.mesh, viz_level, viz_path);
    std::cout << "wrote " << viz_path << "\n";
  }
  timings.push_back({"write", seconds_since(t2)});

  const auto t3 = std::chrono::steady_clock::now();
  CurvingReport report = build_report(result.mesh, model, classification, result.report, {}, yplus);
  timings.push_back({"report", seconds_since(t3)});
  report.timings = timings;
  write_report(report, report_path, csv_path);
  std::cout << "wrote " << report_path << " and " << csv_path << "\n";

  print_report_summary(report);
  std::cout << "solver: boundary error = " << format_double(result.report.final_boundary_error)
            << " (limit " << format_double(cfg.eps_star * result.report.ell_c)
            << "), grad_inf = " << format_double(result.report.final_grad_inf) << " (limit "
            << format_double(cfg.omega_star) << ")\n";
  if (!result.report.invalid_elements.empty())
    std::cout << "warning: " << result.report.invalid_elements.size()
              << " elements have nonpositive scaled Jacobian\n";
  if (!result.report.converged) {
    std::cout << "NOT CONVERGED: outputs above hold the last iterate\n";
    return 2;
  }
  std::cout << "converged\n";
  return 0;
}

int run_check(const std::string& mesh_path, const std::string& geo_path,
              const std::string& cls_path, const std::string& report_path, int viz_level) {
  const HighOrderMesh mesh = read_curved_mesh(mesh_path);
  const GeometryModel model = read_geometry(geo_path);
  const BoundaryClassification classification = read_classification(cls_path);

  SolveReport solve;  // metrics only: nothing was solved
  solve.converged = true;
  solve.ell_c = mesh.ell_c;
  const CurvingReport report = build_report(mesh, model, classification, solve);

  std::cout << "checked " << mesh_path << " (degree " << mesh.degree << ", "
            << report.metadata.element_count << " elements)\n";
  print_report_summary(report);
  if (report.scaled_jacobian.min_value <= 0.0)
    std::cout << "warning: mesh contains invalid elements\n";
  if (!report_path.empty()) {
    write_report(report, report_path, stem_of(report_path) + ".csv");
    std::cout << "wrote " << report_path << "\n";
  }
  if (viz_level > 0) {
    const std::string viz_path = stem_of(mesh_path) + ".vtu";
    write_visualization(mesh, viz_level, viz_path);
    std::cout << "wrote " << viz_path << "\n";
  }
  return 0;
}

int run_fixture_bullet(const BulletParams& params, const std::string& prefix) {
  params.validate();
  const BulletFixture fix = make_bullet(params);
  write_bullet(fix, prefix);
  std::cout << "wrote " << prefix << ".msh (" << fix.mesh.vertices.size() << " vertices, "
            << fix.mesh.tets.size() << " tets, " << fix.mesh.boundary.size()
            << " boundary faces)\n";
  std::cout << "wrote " << prefix << "_geometry.json (" << fix.model.surfaces.size()
            << " virtual surfaces, " << fix.model.curves.size() << " curves)\n";
  std::cout << "wrote " << prefix << "_classification.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Curves straight-sided tetrahedral meshes to the geometry of a virtual\n"
      "surface model and reports mesh quality and boundary accuracy.\n"
      "Set HOCURVE_THREADS to bound the worker count."};
  app.require_subcommand(1);
  // --h is a real option below, so help gets no single-letter form
  app.set_help_flag("--help", "print help and exit");

  std::string mesh_path, geo_path, cls_path, config_path, out_path, report_path, yplus;
  int degree = 0;
  int viz_level = 0;

  CLI::App* curve = app.add_subcommand("curve", "Curve a linear mesh to the model");
  curve->add_option("mesh", mesh_path, "linear tetrahedral mesh (MSH)")->required();
  curve->add_option("geometry", geo_path, "virtual surface model (JSON)")->required();
  curve->add_option("classification", cls_path, "boundary classification (JSON)")->required();
  curve->add_option("--config", config_path, "solver settings file");
  curve->add_option("--degree", degree, "target polynomial degree (2..4, overrides the config)")
      ->check(CLI::Range(2, 4));
  curve->add_option("--out", out_path, "curved mesh output path (default <mesh>_q<degree>.msh)");
  curve->add_option("--report", report_path, "report JSON path (CSV written alongside)");
  curve->add_option("--viz-level", viz_level, "also write a visualization file at this subdivision level")
      ->check(CLI::PositiveNumber);
  curve->add_option("--yplus", yplus, "free-text mesh family label recorded in the report");

  CLI::App* check = app.add_subcommand("check", "Recompute quality and accuracy of a curved mesh");
  check->add_option("mesh", mesh_path, "curved mesh (MSH)")->required();
  check->add_option("geometry", geo_path, "virtual surface model (JSON)")->required();
  check->add_option("classification", cls_path, "boundary classification (JSON)")->required();
  check->add_option("--report", report_path, "write the recomputed report here (JSON + CSV)");
  check->add_option("--viz-level", viz_level, "also write a visualization file at this subdivision level")
      ->check(CLI::PositiveNumber);

  CLI::App* fixtures = app.add_subcommand("fixtures", "Generate built-in test problems");
  fixtures->require_subcommand(1);
  BulletParams bullet_params;
  std::string prefix = "bullet";
  CLI::App* bullet = fixtures->add_subcommand(
      "bullet", "Hemisphere-nosed cylinder in a spherical far field");
  bullet->add_option("--h", bullet_params.h, "target surface edge length");
  bullet->add_option("--normal-jump-deg", bullet_params.normal_jump_deg,
                     "normal discontinuity at the nose-barrel junction (degrees)");
  bullet->add_option("--cylinder-length", bullet_params.cylinder_length, "barrel length");
  bullet->add_option("--far-radius", bullet_params.far_radius, "far-field sphere radius");
  bullet->add_option("--shells", bullet_params.shells, "radial layers (0 = pick from h)");
  bullet->add_flag("--straddle-junction", bullet_params.straddle_junction,
                   "keep vertex rings off the nose-barrel circle");
  bullet->add_option("--out", prefix, "output path prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (curve->parsed())
      return run_curve(mesh_path, geo_path, cls_path, config_path, degree, out_path, report_path,
                       viz_level, yplus);
    if (check->parsed())
      return run_check(mesh_path, geo_path, cls_path, report_path, viz_level);
    if (bullet->parsed()) return run_fixture_bullet(bullet_params, prefix);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
