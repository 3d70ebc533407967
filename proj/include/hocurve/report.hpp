#pragma once

#include <string>
#include <vector>

#include "hocurve/accuracy.hpp"
#include "hocurve/solver.hpp"

namespace hocurve {

/// Fixed-width histogram of a quality measure over [0, 1]; values are
/// clamped into the end bins, so counts always sum to the element count.
struct QualityHistogram {
  std::string measure;            // "qS" or "qSJ"
  int bins = 20;
  std::vector<long> counts;       // size bins, bin k covers [k/bins, (k+1)/bins)
  double min_value = 0.0;
  double mean_value = 0.0;
  int min_element = -1;           // element realizing the minimum
  bool log_scale_hint = true;     // plot counts on a log axis
};

QualityHistogram make_histogram(const std::string& measure, const std::vector<double>& values,
                                int bins = 20);

struct PhaseTiming {
  std::string phase;
  double seconds = 0.0;
};

/// Everything a curving run reports: quality distributions, geometric
/// accuracy, the convergence record and run metadata.
struct CurvingReport {
  struct Metadata {
    int degree = 1;
    long node_count = 0;
    long element_count = 0;
    long boundary_count = 0;
    double ell_c = 0.0;
    std::string yplus_label;  // free-text mesh-family label, carried verbatim
  } metadata;

  QualityHistogram shape;            // q^S
  QualityHistogram scaled_jacobian;  // q^SJ
  AccuracyReport accuracy;
  SolveReport solve;
  std::vector<PhaseTiming> timings;
};

/// Measures per-element qualities (rule exactness: the solver rule + 4) and
/// accuracy, and assembles the report. `solve` may be empty when only
/// checking an existing mesh.
CurvingReport build_report(const HighOrderMesh& mesh, const GeometryModel& model,
                           const BoundaryClassification& classification, const SolveReport& solve,
                           std::vector<PhaseTiming> timings = {}, const std::string& yplus = "");

/// Writes the JSON document and the tabular CSV (accuracy rows, histogram
/// bins, per-iteration trace). Both print doubles with 17 significant
/// digits, so shared values are byte-equal across the two files.
void write_report(const CurvingReport& report, const std::string& json_path,
                  const std::string& csv_path);

/// Reads back a JSON report written by write_report (round-trip checks and
/// downstream tooling). Throws ParseError on malformed documents.
CurvingReport read_report(const std::string& json_path);

}  // namespace hocurve
