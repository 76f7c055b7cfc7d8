#include "killingflow/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "CLI11.hpp"

namespace kflow {

namespace {

using Slot = std::variant<int*, double*, std::string*, bool*, std::vector<std::string>*>;

struct Key {
  std::string section;
  std::string name;
  Slot slot;
  std::string full() const { return section + "." + name; }
};

// Every recognized key, bound to the members of `c`.  The order here is the
// serialization order.
std::vector<Key> keys_of(RunConfig& c) {
  return {
      {"model", "name", &c.model.name},
      {"model", "n", &c.model.n},
      {"model", "quad_tol", &c.model.quad_tol},
      {"model", "warp", &c.model.warp},
      {"model", "warp_kappa", &c.model.warp_kappa},
      {"model", "warp_table", &c.model.warp_table},
      {"model", "killing", &c.model.killing},
      {"model", "killing_kappa", &c.model.killing_kappa},
      {"model", "killing_level", &c.model.killing_level},
      {"model", "killing_table", &c.model.killing_table},
      {"grid", "nr", &c.grid.nr},
      {"grid", "ntheta", &c.grid.ntheta},
      {"grid", "R", &c.grid.R},
      {"control", "scheme", &c.control.scheme},
      {"control", "cfl", &c.control.cfl},
      {"control", "dt_max", &c.control.dt_max},
      {"problem", "phi", &c.problem.phi},
      {"problem", "u0", &c.problem.u0},
      {"problem", "T", &c.problem.T},
      {"problem", "snapshot_every", &c.problem.snapshot_every},
      {"exhaust", "r0", &c.exhaust.r0},
      {"exhaust", "rungs", &c.exhaust.rungs},
      {"exhaust", "growth", &c.exhaust.growth},
      {"exhaust", "tol", &c.exhaust.tol},
      {"exhaust", "rings_per_unit", &c.exhaust.rings_per_unit},
      {"exhaust", "ntheta", &c.exhaust.ntheta},
      {"exhaust", "dt_max", &c.exhaust.dt_max},
      {"exhaust", "blend_radius", &c.exhaust.blend_radius},
      {"exhaust", "stop_early", &c.exhaust.stop_early},
      {"verify", "checks", &c.verify.checks},
      {"verify", "hemisphere_tol", &c.verify.hemisphere_tol},
      {"verify", "cmc_tol", &c.verify.cmc_tol},
      {"verify", "supersolution_tol", &c.verify.supersolution_tol},
      {"verify", "curvature_tol", &c.verify.curvature_tol},
      {"verify", "operator_order", &c.verify.operator_order},
  };
}

const std::array<std::string, 6> kSections{"model", "grid", "control", "problem", "exhaust", "verify"};

std::string shortest(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  std::string s(buf.data(), res.ptr);
  // keep floats recognizable as floats in the TOML text
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  if (s.find('\'') == std::string::npos) return "'" + s + "'";
  return "\"" + s + "\"";
}

int to_int(const Key& key, const std::string& text) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw SchemaError(key.full(), "expected an integer, got \"" + text + "\"");
  }
  return v;
}

double to_double(const Key& key, const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw SchemaError(key.full(), "expected a finite number, got \"" + text + "\"");
  }
  return v;
}

bool to_bool(const Key& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw SchemaError(key.full(), "expected true or false, got \"" + text + "\"");
}

void assign(const Key& key, const std::vector<std::string>& inputs) {
  if (auto* list = std::get_if<std::vector<std::string>*>(&key.slot)) {
    **list = inputs;
    return;
  }
  if (inputs.size() != 1) throw SchemaError(key.full(), "expected a single value");
  const std::string& text = inputs.front();
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, int>) *p = to_int(key, text);
        else if constexpr (std::is_same_v<T, double>) *p = to_double(key, text);
        else if constexpr (std::is_same_v<T, bool>) *p = to_bool(key, text);
        else if constexpr (std::is_same_v<T, std::string>) *p = text;
      },
      key.slot);
}

void require(bool ok, const std::string& key, const std::string& constraint) {
  if (!ok) throw SchemaError(key, constraint);
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

void check_expression(const std::string& key, const std::string& src, bool allow_r) {
  Expr e;
  try {
    e = parse_expression(src);
  } catch (const Error& err) {
    throw SchemaError(key, err.what());
  }
  require(!e.uses_t(), key, "the variable t is not available here");
  require(allow_r || !e.uses_r(), key, "boundary data depends on theta only");
}

}  // namespace

const std::vector<std::string>& verify_check_names() {
  static const std::vector<std::string> names{"hemisphere", "cmc", "supersolution", "operator",
                                              "curvature",  "constants", "exhaust"};
  return names;
}

void validate_config(const RunConfig& c) {
  const auto& m = c.model;
  require(one_of(m.name, {"euclidean", "hyperbolic", "hyperbolic_base", "custom"}), "model.name",
          "one of euclidean, hyperbolic, hyperbolic_base, custom");
  require(m.n >= 2 && m.n <= 8, "model.n", "2 <= n <= 8");
  require(m.quad_tol >= 1e-14 && m.quad_tol <= 1e-4, "model.quad_tol", "1e-14 <= quad_tol <= 1e-4");
  require(one_of(m.warp, {"euclidean", "hyperbolic", "table"}), "model.warp",
          "one of euclidean, hyperbolic, table");
  require(m.warp_kappa > 0.0, "model.warp_kappa", "warp_kappa > 0");
  require(m.warp != "table" || !m.warp_table.empty(), "model.warp_table",
          "required when warp = table");
  require(one_of(m.killing, {"constant", "cosh", "table"}), "model.killing",
          "one of constant, cosh, table");
  require(m.killing_kappa > 0.0, "model.killing_kappa", "killing_kappa > 0");
  require(m.killing_level > 0.0, "model.killing_level", "killing_level > 0");
  require(m.killing != "table" || !m.killing_table.empty(), "model.killing_table",
          "required when killing = table");

  require(c.grid.nr >= 4 && c.grid.nr <= 100000, "grid.nr", "4 <= nr <= 100000");
  require(c.grid.ntheta == 1 || (c.grid.ntheta >= 8 && c.grid.ntheta <= 4096), "grid.ntheta",
          "ntheta >= 8 or = 1");
  require(c.grid.R > 0.0, "grid.R", "R > 0");

  require(one_of(c.control.scheme, {"explicit_euler", "semi_implicit"}), "control.scheme",
          "one of explicit_euler, semi_implicit");
  require(c.control.cfl > 0.0 && c.control.cfl <= 1.0, "control.cfl", "0 < cfl <= 1");
  require(c.control.dt_max > 0.0, "control.dt_max", "dt_max > 0");

  check_expression("problem.phi", c.problem.phi, false);
  if (!c.problem.u0.empty()) check_expression("problem.u0", c.problem.u0, true);
  require(c.problem.T >= 0.0, "problem.T", "T >= 0 (0 selects zeta(R)/2)");
  require(c.problem.snapshot_every >= 0, "problem.snapshot_every", "snapshot_every >= 0");

  const auto& e = c.exhaust;
  require(e.r0 > 0.0, "exhaust.r0", "r0 > 0");
  require(e.rungs >= 2 && e.rungs <= 12, "exhaust.rungs", "2 <= rungs <= 12");
  require(e.growth > 1.0, "exhaust.growth", "growth > 1");
  require(e.tol > 0.0, "exhaust.tol", "tol > 0");
  require(e.rings_per_unit >= 1 && e.rings_per_unit <= 256, "exhaust.rings_per_unit",
          "1 <= rings_per_unit <= 256");
  require(e.ntheta >= 8 && e.ntheta <= 4096, "exhaust.ntheta", "8 <= ntheta <= 4096");
  require(e.dt_max > 0.0, "exhaust.dt_max", "dt_max > 0");
  require(e.blend_radius > 0.0, "exhaust.blend_radius", "blend_radius > 0");

  const auto& v = c.verify;
  require(!v.checks.empty(), "verify.checks", "at least one check");
  for (const auto& name : v.checks) {
    const auto& known = verify_check_names();
    require(name == "all" || std::find(known.begin(), known.end(), name) != known.end(),
            "verify.checks", "unknown check \"" + name + "\"");
  }
  require(v.hemisphere_tol > 0.0, "verify.hemisphere_tol", "hemisphere_tol > 0");
  require(v.cmc_tol > 0.0, "verify.cmc_tol", "cmc_tol > 0");
  require(v.supersolution_tol > 0.0, "verify.supersolution_tol", "supersolution_tol > 0");
  require(v.curvature_tol > 0.0, "verify.curvature_tol", "curvature_tol > 0");
  require(v.operator_order > 0.0, "verify.operator_order", "operator_order > 0");
}

RunConfig parse_config(const std::string& text) {
  std::vector<CLI::ConfigItem> items;
  try {
    std::istringstream in(text);
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  RunConfig config;
  auto keys = keys_of(config);
  std::set<std::string> sections_seen, keys_seen;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") {
      if (!item.parents.empty()) sections_seen.insert(item.parents.front());
      continue;
    }
    const std::string full = item.fullname();
    // top-level shorthand: model = "euclidean", n = 2
    if (item.parents.empty() && (item.name == "model" || item.name == "n")) {
      Key alias = item.name == "model" ? Key{"model", "name", &config.model.name}
                                       : Key{"model", "n", &config.model.n};
      require(keys_seen.insert(alias.full()).second, alias.full(), "duplicate key");
      assign(alias, item.inputs);
      sections_seen.insert("model");
      continue;
    }
    if (item.parents.size() != 1) throw SchemaError(full, "keys belong to one of the sections [model], [grid], [control], [problem], [exhaust], [verify]");
    const std::string& section = item.parents.front();
    require(std::find(kSections.begin(), kSections.end(), section) != kSections.end(), full,
            "unknown section [" + section + "]");
    sections_seen.insert(section);
    const auto it = std::find_if(keys.begin(), keys.end(),
                                 [&](const Key& k) { return k.section == section && k.name == item.name; });
    require(it != keys.end(), full, "unknown key");
    require(keys_seen.insert(full).second, full, "duplicate key");
    assign(*it, item.inputs);
  }
  require(sections_seen.count("model") == 1, "model", "missing section [model]");
  validate_config(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
  RunConfig copy = config;
  const auto keys = keys_of(copy);
  std::ostringstream out;
  std::string current;
  for (const auto& key : keys) {
    if (key.section != current) {
      if (!current.empty()) out << "\n";
      out << "[" << key.section << "]\n";
      current = key.section;
    }
    out << key.name << " = ";
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, int>) out << *p;
          else if constexpr (std::is_same_v<T, double>) out << shortest(*p);
          else if constexpr (std::is_same_v<T, bool>) out << (*p ? "true" : "false");
          else if constexpr (std::is_same_v<T, std::string>) out << quoted(*p);
          else {
            out << "[";
            for (std::size_t i = 0; i < p->size(); ++i) out << (i ? ", " : "") << quoted((*p)[i]);
            out << "]";
          }
        },
        key.slot);
    out << "\n";
  }
  return out.str();
}

ModelSpec model_spec(const ModelSection& m) {
  ModelSpec spec;
  if (m.name == "euclidean") spec = euclidean_model(m.n);
  else if (m.name == "hyperbolic") spec = hyperbolic_model(m.n);
  else if (m.name == "hyperbolic_base") spec = hyperbolic_base_model(m.n);
  else if (m.name == "custom") {
    spec.n = m.n;
    if (m.warp == "euclidean") spec.warp = ProfileSpec::euclidean();
    else if (m.warp == "hyperbolic") spec.warp = ProfileSpec::hyperbolic(m.warp_kappa);
    else spec.warp = load_profile_table(m.warp_table);
    spec.lower_warp = spec.warp;
    if (m.killing == "constant") spec.killing = ProfileSpec::constant(m.killing_level);
    else if (m.killing == "cosh") spec.killing = ProfileSpec::cosh(m.killing_kappa);
    else spec.killing = load_profile_table(m.killing_table);
  } else {
    throw SchemaError("model.name", "unknown model \"" + m.name + "\"");
  }
  spec.quad_tol = m.quad_tol;
  return spec;
}

StepControl step_control(const ControlSection& section) {
  StepControl control;
  control.scheme = scheme_from_string(section.scheme);
  control.cfl = section.cfl;
  control.dt_max = section.dt_max;
  return control;
}

}  // namespace kflow
