#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "killingflow/errors.hpp"
#include "killingflow/flow.hpp"

namespace kflow {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool RunManifest::operator==(const RunManifest& o) const {
  return model_fingerprint == o.model_fingerprint && model_description == o.model_description &&
         nr == o.nr && ntheta == o.ntheta && R == o.R && T == o.T && dt == o.dt &&
         control.scheme == o.control.scheme && control.cfl == o.control.cfl &&
         control.dt_max == o.control.dt_max && control.tol_lin == o.control.tol_lin &&
         times == o.times && files == o.files;
}

std::string snapshot_csv(const Grid& grid, const FlowState& state) {
  if (state.u.size() != grid.size() || state.W.size() != grid.size()) {
    throw ParameterError("snapshot does not match grid");
  }
  std::string out = "t,r,theta,u,W\n";
  const std::string t = format_double(state.t);
  for (int ring = 0; ring <= grid.nr; ++ring) {
    const int count = ring == 0 ? 1 : grid.ntheta;
    for (int j = 0; j < count; ++j) {
      const auto k = grid.index(ring, j);
      out += t + ',' + format_double(grid.r[ring]) + ',' +
             format_double(ring == 0 ? 0.0 : grid.theta[j]) + ',' + format_double(state.u[k]) +
             ',' + format_double(state.W[k]) + '\n';
    }
  }
  return out;
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["model_fingerprint"] = m.model_fingerprint;
  j["model"] = m.model_description;
  j["grid"] = {{"nr", m.nr}, {"ntheta", m.ntheta}, {"R", m.R}};
  j["T"] = m.T;
  j["dt"] = m.dt;
  j["control"] = {{"scheme", to_string(m.control.scheme)},
                  {"cfl", m.control.cfl},
                  {"dt_max", m.control.dt_max},
                  {"tol_lin", m.control.tol_lin}};
  j["times"] = m.times;
  j["files"] = m.files;
  return j.dump(2);
}

RunManifest manifest_from_json(const std::string& text) {
  RunManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.model_fingerprint = j.at("model_fingerprint").get<std::string>();
    m.model_description = j.at("model").get<std::string>();
    m.nr = j.at("grid").at("nr").get<int>();
    m.ntheta = j.at("grid").at("ntheta").get<int>();
    m.R = j.at("grid").at("R").get<double>();
    m.T = j.at("T").get<double>();
    m.dt = j.at("dt").get<double>();
    const auto& c = j.at("control");
    m.control.scheme = scheme_from_string(c.at("scheme").get<std::string>());
    m.control.cfl = c.at("cfl").get<double>();
    m.control.dt_max = c.at("dt_max").get<double>();
    m.control.tol_lin = c.at("tol_lin").get<double>();
    m.times = j.at("times").get<std::vector<double>>();
    m.files = j.at("files").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed run manifest: ") + e.what());
  }
  return m;
}

RunManifest write_run(const std::string& directory, const ModelGeometry& model,
                      const Trajectory& trajectory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  RunManifest m;
  m.model_fingerprint = model.fingerprint();
  m.model_description = model.describe();
  m.nr = trajectory.grid.nr;
  m.ntheta = trajectory.grid.ntheta;
  m.R = trajectory.grid.R;
  m.T = trajectory.T;
  m.dt = trajectory.dt;
  m.control = trajectory.control;
  m.times = trajectory.times;
  for (std::size_t k = 0; k < trajectory.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", k);
    std::ofstream out(fs::path(directory) / name);
    if (!out) throw ParameterError("cannot write " + (fs::path(directory) / name).string());
    out << snapshot_csv(trajectory.grid, trajectory.snapshots[k]);
    m.files.emplace_back(name);
  }
  std::ofstream man(fs::path(directory) / "manifest.json");
  if (!man) throw ParameterError("cannot write manifest in " + directory);
  man << manifest_to_json(m) << '\n';
  return m;
}

}  // namespace kflow
