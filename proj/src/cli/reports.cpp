#include <array>
#include <charconv>
#include <cmath>

#include "killingflow/cli.hpp"
#include "killingflow/cmc_radial.hpp"

namespace kflow {

namespace {

// JSON has no NaN or infinity; those become null and the schemas allow it.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\r\n";
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

Json model_json(const ModelGeometry& model, const std::string& name) {
  Json j;
  j["name"] = name;
  j["n"] = model.n();
  j["quad_tol"] = model.quad_tol();
  j["description"] = model.describe();
  j["fingerprint"] = model.fingerprint();
  return j;
}

Json model_info_report(const ModelGeometry& model, const std::string& name, int samples) {
  Json j;
  j["kind"] = "model-info";
  j["model"] = model_json(model, name);
  const auto& v = model.validation();
  j["validation"] = {{"samples", v.samples},
                     {"window_start", number(v.window_start)},
                     {"window_end", number(v.window_end)},
                     {"killing_log_slope_tail_min", number(v.killing_log_slope_tail_min)}};
  Json rows = Json::array();
  const double r_max = std::min(4.0, model.r_end());
  for (int i = 1; i <= samples; ++i) {
    const double r = r_max * i / samples;
    rows.push_back({{"r", r},
                    {"warp", number(model.warp().value(r))},
                    {"killing", number(model.killing().value(r))},
                    {"area_density", number(model.area_density(r))},
                    {"enclosed_volume", number(model.enclosed_volume(r))},
                    {"warp_primitive", number(model.warp_primitive(r))},
                    {"sphere_mean_curvature", number(model.sphere_mean_curvature(r))},
                    {"cylinder_mean_curvature", number(model.cylinder_mean_curvature(r))}});
  }
  j["samples"] = std::move(rows);
  return j;
}

Json cmc_report(const ModelGeometry& model, const std::string& name, const CmcProfile& profile) {
  Json j;
  j["kind"] = "cmc";
  j["model"] = model_json(model, name);
  j["R"] = profile.R;
  j["mean_curvature"] = profile.mean_curvature;
  j["grid"] = static_cast<int>(profile.r.size()) - 1;
  j["residual"] = number(cmc_residual(model, profile));
  Json rows = Json::array();
  for (std::size_t i = 0; i < profile.r.size(); ++i) {
    rows.push_back({{"r", profile.r[i]}, {"v", profile.v[i]}, {"v_prime", number(profile.vp[i])}});
  }
  j["profile"] = std::move(rows);
  return j;
}

std::string cmc_csv(const CmcProfile& profile) {
  std::string out = csv_row({"r", "v", "v_prime"});
  for (std::size_t i = 0; i < profile.r.size(); ++i) {
    out += csv_row({format_double(profile.r[i]), format_double(profile.v[i]),
                    format_double(profile.vp[i])});
  }
  return out;
}

Json flow_report(const ModelGeometry& model, const std::string& name, const Trajectory& traj) {
  Json j;
  j["kind"] = "flow";
  j["model"] = model_json(model, name);
  j["grid"] = {{"nr", traj.grid.nr}, {"ntheta", traj.grid.ntheta}, {"R", traj.grid.R}};
  j["control"] = {{"scheme", to_string(traj.control.scheme)},
                  {"cfl", traj.control.cfl},
                  {"dt_max", traj.control.dt_max}};
  j["T"] = traj.T;
  j["dt"] = traj.dt;
  j["steps"] = traj.snapshots.empty() ? 0 : traj.snapshots.back().step_count;
  Json snaps = Json::array();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& s = traj.snapshots[k];
    double sup = 0.0, lo = s.u.empty() ? 0.0 : s.u[0], hi = lo;
    for (double v : s.u) {
      sup = std::max(sup, std::abs(v));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    snaps.push_back({{"t", s.t},
                     {"min_u", lo},
                     {"max_u", hi},
                     {"sup_abs_u", sup},
                     {"max_gradient", number(traj.max_gradient.at(k))},
                     {"max_curvature", number(traj.max_curvature.at(k))}});
  }
  j["snapshots"] = std::move(snaps);
  return j;
}

Json exhaust_report(const ModelGeometry& model, const std::string& name,
                    const ExhaustionPlan& plan, const ConvergenceReport& rep) {
  Json j;
  j["kind"] = "exhaust";
  j["model"] = model_json(model, name);
  j["r0"] = rep.r0;
  j["T0"] = rep.T0;
  j["tol"] = rep.tol;
  j["ladder"] = plan.ladder;
  j["grid"] = {{"rings_per_unit", plan.rings_per_unit},
               {"ntheta", plan.ntheta},
               {"dt_max", plan.control.dt_max}};
  Json rungs = Json::array();
  for (const auto& r : rep.rungs) {
    rungs.push_back({{"R", r.R},
                     {"nr", r.nr},
                     {"steps", r.steps},
                     {"d_k", number(r.d_next)},
                     {"interpolation_budget", r.interpolation_budget},
                     {"max_grad", r.max_grad},
                     {"max_A", r.max_A},
                     {"sup_W2", r.sup_W2},
                     {"sup_abs_u", r.sup_abs_u},
                     {"margins",
                      {{"height", number(r.height_margin)},
                       {"gradient", number(std::isfinite(rep.log_gradient_bound) && r.max_grad > 0.0
                                               ? rep.log_gradient_bound - std::log(r.max_grad)
                                               : std::numeric_limits<double>::quiet_NaN())},
                       {"curvature", number(r.curvature_bound - r.max_A)}}},
                     {"curvature_bound", number(r.curvature_bound)},
                     {"height_cap", r.height_cap}});
  }
  j["rungs"] = std::move(rungs);
  j["d"] = rep.d;
  j["decreasing"] = rep.decreasing;
  j["stopped_early"] = rep.stopped_early;
  j["gradient"] = {{"M", rep.gradient_M}, {"log_bound", number(rep.log_gradient_bound)}};
  j["checks"] = {{"gradient", rep.gradient_check},
                 {"curvature", rep.curvature_check},
                 {"height", rep.height_check}};
  j["note"] = rep.estimate_note;
  j["verdict"] = rep.verdict ? "pass" : "fail";
  return j;
}

}  // namespace kflow
