#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "hocurve/config.hpp"

namespace hocurve {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& v) {
  std::size_t used = 0;
  const int r = std::stoi(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return r;
}

double parse_float(const std::string& v) {
  std::size_t used = 0;
  const double r = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return r;
}

bool parse_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw std::invalid_argument(v);
}

using Setter = std::function<void(SolverConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"target_degree", [](SolverConfig& c, const std::string& v) { c.target_degree = parse_int(v); }},
      {"eps_star", [](SolverConfig& c, const std::string& v) { c.eps_star = parse_float(v); }},
      {"omega_star", [](SolverConfig& c, const std::string& v) { c.omega_star = parse_float(v); }},
      {"mu0", [](SolverConfig& c, const std::string& v) { c.mu0 = parse_float(v); }},
      {"growth", [](SolverConfig& c, const std::string& v) { c.growth = parse_float(v); }},
      {"max_stages", [](SolverConfig& c, const std::string& v) { c.max_stages = parse_int(v); }},
      {"max_newton", [](SolverConfig& c, const std::string& v) { c.max_newton = parse_int(v); }},
      {"armijo_slope", [](SolverConfig& c, const std::string& v) { c.armijo_slope = parse_float(v); }},
      {"backtrack", [](SolverConfig& c, const std::string& v) { c.backtrack = parse_float(v); }},
      {"max_halvings", [](SolverConfig& c, const std::string& v) { c.max_halvings = parse_int(v); }},
      {"gmres_restart", [](SolverConfig& c, const std::string& v) { c.gmres_restart = parse_int(v); }},
      {"gmres_max_iterations",
       [](SolverConfig& c, const std::string& v) { c.gmres_max_iterations = parse_int(v); }},
      {"forcing.eta_max", [](SolverConfig& c, const std::string& v) { c.forcing.eta_max = parse_float(v); }},
      {"forcing.theta", [](SolverConfig& c, const std::string& v) { c.forcing.theta = parse_float(v); }},
      {"forcing.gamma", [](SolverConfig& c, const std::string& v) { c.forcing.gamma = parse_float(v); }},
      {"forcing.floor", [](SolverConfig& c, const std::string& v) { c.forcing.floor = parse_float(v); }},
      {"freeze_problematic",
       [](SolverConfig& c, const std::string& v) { c.freeze_problematic = parse_bool(v); }},
      {"continuation",
       [](SolverConfig& c, const std::string& v) { c.continuation = parse_bool(v); }},
      {"tangency_threshold_deg",
       [](SolverConfig& c, const std::string& v) { c.tangency_threshold_deg = parse_float(v); }},
      {"use_mu_predictor",
       [](SolverConfig& c, const std::string& v) { c.use_mu_predictor = parse_bool(v); }},
      {"delta", [](SolverConfig& c, const std::string& v) { c.delta = parse_float(v); }},
      {"exactness", [](SolverConfig& c, const std::string& v) { c.exactness = parse_int(v); }},
      {"sor_sweeps", [](SolverConfig& c, const std::string& v) { c.sor_sweeps = parse_int(v); }},
  };
  return table;
}

}  // namespace

void apply_config_entry(SolverConfig& cfg, const std::string& key, const std::string& value) {
  auto it = setters().find(key);
  if (it == setters().end()) throw InvalidInputError("unknown config key '" + key + "'");
  try {
    it->second(cfg, value);
  } catch (const std::exception&) {
    throw InvalidInputError("bad value '" + value + "' for config key '" + key + "'");
  }
}

SolverConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  SolverConfig cfg;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    // tolerate quoted scalars so the files stay valid TOML
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    try {
      apply_config_entry(cfg, key, value);
    } catch (const InvalidInputError& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  cfg.validate();
  return cfg;
}

void write_config(const SolverConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "target_degree = " << cfg.target_degree << "\n";
  out << "eps_star = " << format_double(cfg.eps_star) << "\n";
  out << "omega_star = " << format_double(cfg.omega_star) << "\n";
  out << "mu0 = " << format_double(cfg.mu0) << "\n";
  out << "growth = " << format_double(cfg.growth) << "\n";
  out << "max_stages = " << cfg.max_stages << "\n";
  out << "max_newton = " << cfg.max_newton << "\n";
  out << "armijo_slope = " << format_double(cfg.armijo_slope) << "\n";
  out << "backtrack = " << format_double(cfg.backtrack) << "\n";
  out << "max_halvings = " << cfg.max_halvings << "\n";
  out << "gmres_restart = " << cfg.gmres_restart << "\n";
  out << "gmres_max_iterations = " << cfg.gmres_max_iterations << "\n";
  out << "forcing.eta_max = " << format_double(cfg.forcing.eta_max) << "\n";
  out << "forcing.theta = " << format_double(cfg.forcing.theta) << "\n";
  out << "forcing.gamma = " << format_double(cfg.forcing.gamma) << "\n";
  out << "forcing.floor = " << format_double(cfg.forcing.floor) << "\n";
  out << "freeze_problematic = " << (cfg.freeze_problematic ? "true" : "false") << "\n";
  out << "continuation = " << (cfg.continuation ? "true" : "false") << "\n";
  out << "tangency_threshold_deg = " << format_double(cfg.tangency_threshold_deg) << "\n";
  out << "use_mu_predictor = " << (cfg.use_mu_predictor ? "true" : "false") << "\n";
  out << "delta = " << format_double(cfg.delta) << "\n";
  out << "exactness = " << cfg.exactness << "\n";
  out << "sor_sweeps = " << cfg.sor_sweeps << "\n";
  if (!out) throw Error("write failed for " + path);
}

}  // namespace hocurve
