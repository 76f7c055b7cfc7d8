#pragma once

#include <string>
#include <vector>

#include "killingflow/expr.hpp"
#include "killingflow/flow.hpp"
#include "killingflow/geometry.hpp"

namespace kflow {

struct SchemaError : ConfigError {
  SchemaError(const std::string& key, const std::string& constraint)
      : ConfigError("config key " + key + ": " + constraint), key(key), constraint(constraint) {}
  std::string key;
  std::string constraint;
};

// [model]
struct ModelSection {
  std::string name = "euclidean";  // euclidean | hyperbolic | hyperbolic_base | custom
  int n = 2;
  double quad_tol = 1e-10;
  // custom models only
  std::string warp = "euclidean";   // euclidean | hyperbolic | table
  double warp_kappa = 1.0;
  std::string warp_table;           // CSV path for warp = table
  std::string killing = "constant"; // constant | cosh | table
  double killing_kappa = 1.0;
  double killing_level = 1.0;
  std::string killing_table;
  bool operator==(const ModelSection&) const = default;
};

// [grid]
struct GridSection {
  int nr = 64;
  int ntheta = 32;  // 1 selects the radial fast path
  double R = 1.0;
  bool operator==(const GridSection&) const = default;
};

// [control]
struct ControlSection {
  std::string scheme = "semi_implicit";
  double cfl = 0.5;
  double dt_max = 1e-3;
  bool operator==(const ControlSection&) const = default;
};

// [problem]: phi is the boundary data in theta; an empty u0 selects the
// smooth blend of phi toward its angular mean inside radius 1.
struct ProblemSection {
  std::string phi = "0";
  std::string u0;
  double T = 0.0;  // 0 selects zeta(R)/2
  int snapshot_every = 0;
  bool operator==(const ProblemSection&) const = default;
};

// [exhaust]
struct ExhaustSection {
  double r0 = 1.0;
  int rungs = 4;
  double growth = 2.0;
  double tol = 1e-3;
  int rings_per_unit = 16;
  int ntheta = 32;
  double dt_max = 1e-2;
  double blend_radius = 1.0;
  bool stop_early = true;
  bool operator==(const ExhaustSection&) const = default;
};

// [verify]
struct VerifySection {
  std::vector<std::string> checks{"all"};
  double hemisphere_tol = 1e-7;
  double cmc_tol = 1e-3;
  double supersolution_tol = 1e-3;
  double curvature_tol = 1e-3;
  double operator_order = 1.8;
  bool operator==(const VerifySection&) const = default;
};

struct RunConfig {
  ModelSection model;
  GridSection grid;
  ControlSection control;
  ProblemSection problem;
  ExhaustSection exhaust;
  VerifySection verify;
  bool operator==(const RunConfig&) const = default;
};

// Names accepted in [verify] checks (plus "all").
const std::vector<std::string>& verify_check_names();

// Parses INI/TOML-style text.  [model] must be present; other sections default.
// Raises ConfigError naming the key and the violated constraint.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Validates ranges; parse_config calls it.
void validate_config(const RunConfig& config);
// TOML text that parse_config maps back to an equal RunConfig.
std::string serialize_config(const RunConfig& config);

ModelSpec model_spec(const ModelSection& section);
StepControl step_control(const ControlSection& section);

}  // namespace kflow
