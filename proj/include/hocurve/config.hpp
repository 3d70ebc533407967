#pragma once

#include <string>

#include "hocurve/solver.hpp"

namespace hocurve {

/// Reads solver settings from a flat TOML-style file: `key = value` lines,
/// `#` comments, keys named exactly like the SolverConfig fields (forcing
/// parameters as forcing.eta_max etc). Unlisted keys keep their defaults;
/// unknown keys are errors. The result is validated before returning.
SolverConfig read_config(const std::string& path);

/// Applies one key/value pair to a config (the CLI uses this for overrides).
void apply_config_entry(SolverConfig& cfg, const std::string& key, const std::string& value);

/// Writes every setting back out in the same format, one line per field.
void write_config(const SolverConfig& cfg, const std::string& path);

}  // namespace hocurve
