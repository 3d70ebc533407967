#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "hocurve/distortion.hpp"
#include "hocurve/report.hpp"

namespace hocurve {

namespace {

using Json = nlohmann::ordered_json;

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json histogram_to_json(const QualityHistogram& h) {
  Json j;
  j["measure"] = h.measure;
  j["bins"] = h.bins;
  j["counts"] = h.counts;
  j["min"] = h.min_value;
  j["mean"] = h.mean_value;
  j["min_element"] = h.min_element;
  j["log_scale_hint"] = h.log_scale_hint;
  return j;
}

QualityHistogram histogram_from_json(const Json& j) {
  QualityHistogram h;
  h.measure = j.at("measure").get<std::string>();
  h.bins = j.at("bins").get<int>();
  h.counts = j.at("counts").get<std::vector<long>>();
  h.min_value = j.at("min").get<double>();
  h.mean_value = j.at("mean").get<double>();
  h.min_element = j.at("min_element").get<int>();
  h.log_scale_hint = j.at("log_scale_hint").get<bool>();
  return h;
}

Json accuracy_to_json(const AccuracyReport& a) {
  Json j;
  j["SC"] = a.sc;
  j["SC/l_c"] = a.sc_rel;
  j["d2"] = a.d2;
  j["d2/l_c"] = a.d2_rel;
  j["dinf"] = a.dinf;
  j["dinf/l_c"] = a.dinf_rel;
  j["wall_area"] = a.wall_area;
  Json worst;
  worst["face"] = a.worst.face;
  worst["point"] = vec_to_json(a.worst.point);
  worst["bary"] = Json::array({a.worst.bary[0], a.worst.bary[1], a.worst.bary[2]});
  worst["distance"] = a.worst.distance;
  j["worst"] = std::move(worst);
  Json per = Json::array();
  for (const auto& row : a.per_surface) {
    Json r;
    r["surface"] = row.surface;
    r["area"] = row.area;
    r["sc"] = row.sc;
    r["d2"] = row.d2;
    r["dinf"] = row.dinf;
    per.push_back(std::move(r));
  }
  j["per_surface"] = std::move(per);
  return j;
}

AccuracyReport accuracy_from_json(const Json& j) {
  AccuracyReport a;
  a.sc = j.at("SC").get<double>();
  a.sc_rel = j.at("SC/l_c").get<double>();
  a.d2 = j.at("d2").get<double>();
  a.d2_rel = j.at("d2/l_c").get<double>();
  a.dinf = j.at("dinf").get<double>();
  a.dinf_rel = j.at("dinf/l_c").get<double>();
  a.wall_area = j.at("wall_area").get<double>();
  const Json& w = j.at("worst");
  a.worst.face = w.at("face").get<int>();
  for (int k = 0; k < 3; ++k) {
    a.worst.point[k] = w.at("point")[k].get<double>();
    a.worst.bary[k] = w.at("bary")[k].get<double>();
  }
  a.worst.distance = w.at("distance").get<double>();
  for (const auto& r : j.at("per_surface")) {
    AccuracyReport::SurfaceRow row;
    row.surface = r.at("surface").get<int>();
    row.area = r.at("area").get<double>();
    row.sc = r.at("sc").get<double>();
    row.d2 = r.at("d2").get<double>();
    row.dinf = r.at("dinf").get<double>();
    a.per_surface.push_back(row);
  }
  return a;
}

Json solve_to_json(const SolveReport& s) {
  Json j;
  j["converged"] = s.converged;
  j["final_boundary_error"] = s.final_boundary_error;
  j["final_grad_inf"] = s.final_grad_inf;
  j["ell_c"] = s.ell_c;
  j["invalid_elements"] = s.invalid_elements;
  Json degrees = Json::array();
  for (const auto& d : s.degrees) {
    Json jd;
    jd["degree"] = d.degree;
    jd["converged"] = d.converged;
    jd["total_newton_iterations"] = d.total_newton_iterations;
    Json stages = Json::array();
    for (const auto& st : d.stages) {
      Json js;
      js["stage"] = st.stage;
      js["mu"] = st.mu;
      js["iterations"] = st.newton.iterations;
      js["converged"] = st.converged;
      js["fresh_boundary_error"] = st.fresh_boundary_error;
      js["grad_inf"] = st.newton.grad_inf;
      stages.push_back(std::move(js));
    }
    jd["stages"] = std::move(stages);
    degrees.push_back(std::move(jd));
  }
  j["degrees"] = std::move(degrees);
  Json prob;
  prob["two_curve_edge_faces"] = s.problematic.two_curve_edge_faces;
  prob["multi_wall_face_elems"] = s.problematic.multi_wall_face_elems;
  Json tang = Json::array();
  for (const auto& t : s.problematic.tangencies) {
    Json jt;
    jt["face"] = t.face;
    jt["node"] = t.node;
    jt["curve_a"] = t.curve_a;
    jt["curve_b"] = t.curve_b;
    jt["angle_deg"] = t.angle_deg;
    tang.push_back(std::move(jt));
  }
  prob["tangencies"] = std::move(tang);
  prob["frozen_faces"] = s.problematic.frozen.faces;
  j["problematic"] = std::move(prob);
  Json trace = Json::array();
  for (const auto& r : s.trace.rows)
    trace.push_back(Json::array({r.degree, r.stage, r.iteration, r.value, r.grad_inf,
                                 r.boundary_error, r.mu, r.lin_tol, r.gmres_iterations, r.step}));
  j["trace"] = std::move(trace);
  return j;
}

SolveReport solve_from_json(const Json& j) {
  SolveReport s;
  s.converged = j.at("converged").get<bool>();
  s.final_boundary_error = j.at("final_boundary_error").get<double>();
  s.final_grad_inf = j.at("final_grad_inf").get<double>();
  s.ell_c = j.at("ell_c").get<double>();
  s.invalid_elements = j.at("invalid_elements").get<std::vector<int>>();
  for (const auto& jd : j.at("degrees")) {
    DegreeOutcome d;
    d.degree = jd.at("degree").get<int>();
    d.converged = jd.at("converged").get<bool>();
    d.total_newton_iterations = jd.at("total_newton_iterations").get<int>();
    for (const auto& js : jd.at("stages")) {
      StageOutcome st;
      st.stage = js.at("stage").get<int>();
      st.mu = js.at("mu").get<double>();
      st.newton.iterations = js.at("iterations").get<int>();
      st.converged = js.at("converged").get<bool>();
      st.fresh_boundary_error = js.at("fresh_boundary_error").get<double>();
      st.newton.grad_inf = js.at("grad_inf").get<double>();
      d.stages.push_back(st);
    }
    s.degrees.push_back(std::move(d));
  }
  const Json& prob = j.at("problematic");
  s.problematic.two_curve_edge_faces = prob.at("two_curve_edge_faces").get<std::vector<int>>();
  s.problematic.multi_wall_face_elems = prob.at("multi_wall_face_elems").get<std::vector<int>>();
  for (const auto& jt : prob.at("tangencies")) {
    ProblematicReport::Tangency t;
    t.face = jt.at("face").get<int>();
    t.node = jt.at("node").get<int>();
    t.curve_a = jt.at("curve_a").get<int>();
    t.curve_b = jt.at("curve_b").get<int>();
    t.angle_deg = jt.at("angle_deg").get<double>();
    s.problematic.tangencies.push_back(t);
  }
  s.problematic.frozen.faces = prob.at("frozen_faces").get<std::vector<int>>();
  for (const auto& row : j.at("trace")) {
    TraceRow r;
    r.degree = row[0].get<int>();
    r.stage = row[1].get<int>();
    r.iteration = row[2].get<int>();
    r.value = row[3].get<double>();
    r.grad_inf = row[4].get<double>();
    r.boundary_error = row[5].get<double>();
    r.mu = row[6].get<double>();
    r.lin_tol = row[7].get<double>();
    r.gmres_iterations = row[8].get<int>();
    r.step = row[9].get<double>();
    s.trace.rows.push_back(r);
  }
  return s;
}

}  // namespace

QualityHistogram make_histogram(const std::string& measure, const std::vector<double>& values,
                                int bins) {
  if (bins < 1) throw InvalidInputError("histogram needs at least one bin");
  QualityHistogram h;
  h.measure = measure;
  h.bins = bins;
  h.counts.assign(bins, 0);
  if (values.empty()) return h;
  double sum = 0.0;
  h.min_value = values.front();
  h.min_element = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    sum += v;
    if (v < h.min_value) {
      h.min_value = v;
      h.min_element = static_cast<int>(i);
    }
    const int bin = std::clamp(static_cast<int>(std::floor(v * bins)), 0, bins - 1);
    ++h.counts[bin];
  }
  h.mean_value = sum / static_cast<double>(values.size());
  return h;
}

CurvingReport build_report(const HighOrderMesh& mesh, const GeometryModel& model,
                           const BoundaryClassification& classification, const SolveReport& solve,
                           std::vector<PhaseTiming> timings, const std::string& yplus) {
  CurvingReport rep;
  rep.metadata.degree = mesh.degree;
  rep.metadata.node_count = static_cast<long>(mesh.nodes.size());
  rep.metadata.element_count = static_cast<long>(mesh.elems.size());
  rep.metadata.boundary_count = static_cast<long>(mesh.boundary.size());
  rep.metadata.ell_c = mesh.ell_c;
  rep.metadata.yplus_label = yplus;

  const QuadratureRule rule = quadrature(3, solver_exactness(mesh.degree) + 4);
  const std::size_t ne = mesh.elems.size();
  std::vector<double> qs(ne), qsj(ne);
  parallel_for(ne, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const ElementQuality eq = element_quality(mesh, static_cast<int>(i), rule);
      qs[i] = eq.shape_quality;
      qsj[i] = std::max(eq.scaled_jacobian, 0.0);
    }
  });
  rep.shape = make_histogram("qS", qs);
  rep.scaled_jacobian = make_histogram("qSJ", qsj);
  rep.accuracy = measure_accuracy(mesh, model, classification);
  rep.solve = solve;
  rep.timings = std::move(timings);
  return rep;
}

void write_report(const CurvingReport& report, const std::string& json_path,
                  const std::string& csv_path) {
  Json doc;
  Json meta;
  meta["degree"] = report.metadata.degree;
  meta["node_count"] = report.metadata.node_count;
  meta["element_count"] = report.metadata.element_count;
  meta["boundary_count"] = report.metadata.boundary_count;
  meta["ell_c"] = report.metadata.ell_c;
  meta["yplus_label"] = report.metadata.yplus_label;
  doc["metadata"] = std::move(meta);
  Json quality;
  quality["qS"] = histogram_to_json(report.shape);
  quality["qSJ"] = histogram_to_json(report.scaled_jacobian);
  doc["quality"] = std::move(quality);
  doc["accuracy"] = accuracy_to_json(report.accuracy);
  doc["solve"] = solve_to_json(report.solve);
  Json timings = Json::array();
  for (const auto& t : report.timings) {
    Json jt;
    jt["phase"] = t.phase;
    jt["seconds"] = t.seconds;
    timings.push_back(std::move(jt));
  }
  doc["timings"] = std::move(timings);

  {
    std::ofstream out(json_path);
    if (!out) throw Error("cannot write " + json_path);
    out << doc.dump(2) << "\n";
    if (!out) throw Error("write failed for " + json_path);
  }

  std::ofstream csv(csv_path);
  if (!csv) throw Error("cannot write " + csv_path);
  csv << "[accuracy]\nmeasure,value\n";
  const AccuracyReport& a = report.accuracy;
  csv << "SC," << format_double(a.sc) << "\n";
  csv << "SC/l_c," << format_double(a.sc_rel) << "\n";
  csv << "d2," << format_double(a.d2) << "\n";
  csv << "d2/l_c," << format_double(a.d2_rel) << "\n";
  csv << "dinf," << format_double(a.dinf) << "\n";
  csv << "dinf/l_c," << format_double(a.dinf_rel) << "\n";
  for (const QualityHistogram* h : {&report.shape, &report.scaled_jacobian}) {
    csv << "\n[histogram " << h->measure << "]\nbin_lo,bin_hi,count\n";
    for (int b = 0; b < h->bins; ++b)
      csv << format_double(static_cast<double>(b) / h->bins) << ","
          << format_double(static_cast<double>(b + 1) / h->bins) << "," << h->counts[b] << "\n";
  }
  csv << "\n[trace]\ndegree,stage,iteration,value,grad_inf,boundary_error,mu,lin_tol,"
         "gmres_iterations,step\n";
  for (const auto& r : report.solve.trace.rows)
    csv << r.degree << "," << r.stage << "," << r.iteration << "," << format_double(r.value) << ","
        << format_double(r.grad_inf) << "," << format_double(r.boundary_error) << ","
        << format_double(r.mu) << "," << format_double(r.lin_tol) << "," << r.gmres_iterations
        << "," << format_double(r.step) << "\n";
  if (!csv) throw Error("write failed for " + csv_path);
}

CurvingReport read_report(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw Error("cannot open " + json_path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(json_path + ": " + e.what());
  }
  try {
    CurvingReport rep;
    const Json& meta = doc.at("metadata");
    rep.metadata.degree = meta.at("degree").get<int>();
    rep.metadata.node_count = meta.at("node_count").get<long>();
    rep.metadata.element_count = meta.at("element_count").get<long>();
    rep.metadata.boundary_count = meta.at("boundary_count").get<long>();
    rep.metadata.ell_c = meta.at("ell_c").get<double>();
    rep.metadata.yplus_label = meta.at("yplus_label").get<std::string>();
    rep.shape = histogram_from_json(doc.at("quality").at("qS"));
    rep.scaled_jacobian = histogram_from_json(doc.at("quality").at("qSJ"));
    rep.accuracy = accuracy_from_json(doc.at("accuracy"));
    rep.solve = solve_from_json(doc.at("solve"));
    for (const auto& jt : doc.at("timings")) {
      PhaseTiming t;
      t.phase = jt.at("phase").get<std::string>();
      t.seconds = jt.at("seconds").get<double>();
      rep.timings.push_back(std::move(t));
    }
    long total = 0;
    for (long c : rep.shape.counts) total += c;
    if (total != rep.metadata.element_count)
      throw ParseError(json_path + ": histogram counts do not sum to the element count");
    total = 0;
    for (long c : rep.scaled_jacobian.counts) total += c;
    if (total != rep.metadata.element_count)
      throw ParseError(json_path + ": histogram counts do not sum to the element count");
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(json_path + ": " + e.what());
  }
}

}  // namespace hocurve
