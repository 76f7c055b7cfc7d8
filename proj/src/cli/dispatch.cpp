#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "killingflow/barriers.hpp"
#include "killingflow/cli.hpp"
#include "killingflow/cmc_radial.hpp"

namespace kflow {

namespace {

// Raised for anything that should end with exit code 2.
struct UsageError : Error {
  using Error::Error;
};

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string svg_path;
  std::uint64_t seed = 0;
  std::string model;
  int n = 0;
  double quad_tol = 0.0;
  bool dry_run = false;
};

const CLI::Validator kFinite(
    [](std::string& text) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(text, v) || !std::isfinite(v)) return "must be a finite number";
      return {};
    },
    "FINITE");

void emit(const CommonOptions& o, const std::string& text, std::ostream& out);

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config_path, "INI/TOML-style run configuration");
  sub->add_option("--out", o.out_path, "write the report here instead of stdout");
  sub->add_option("--seed", o.seed, "seed for randomized sampling (default 0)");
  sub->add_option("--model", o.model, "euclidean | hyperbolic | hyperbolic_base | custom");
  sub->add_option("--n", o.n, "dimension of the base")->check(CLI::Range(2, 8));
  sub->add_option("--quad-tol", o.quad_tol, "quadrature tolerance")->check(kFinite);
  sub->add_flag("--dry-run", o.dry_run, "print the resolved configuration and exit");
}

bool dry_run(const CommonOptions& o, const RunConfig& c, std::ostream& out) {
  if (!o.dry_run) return false;
  emit(o, serialize_config(c), out);
  return true;
}

// Config file (or defaults with a [model] section implied), then flag overrides.
RunConfig resolve_config(const CommonOptions& o) {
  RunConfig config;
  if (!o.config_path.empty()) config = load_config(o.config_path);
  if (!o.model.empty()) config.model.name = o.model;
  if (o.n != 0) config.model.n = o.n;
  if (o.quad_tol != 0.0) config.model.quad_tol = o.quad_tol;
  return config;
}

void emit(const CommonOptions& o, const std::string& text, std::ostream& out) {
  if (o.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out_path, std::ios::binary);
  if (!file) throw Error("cannot write " + o.out_path);
  file << text;
}

void emit_json(const CommonOptions& o, const Json& j, std::ostream& out) {
  emit(o, j.dump(2) + "\n", out);
}

void write_svg(const std::string& path, const std::string& svg) {
  if (path.empty()) return;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  file << svg;
}

std::function<double(double)> angular_function(const std::string& src) {
  const Expr e = parse_expression(src);
  if (e.uses_r() || e.uses_t()) throw ConfigError("boundary data depends on theta only: " + src);
  return [e](double theta) { return e.eval({0.0, theta, 0.0}); };
}

std::function<double(double, double)> polar_function(const std::string& src) {
  const Expr e = parse_expression(src);
  if (e.uses_t()) throw ConfigError("initial data may not depend on t: " + src);
  return [e](double r, double theta) { return e.eval({r, theta, 0.0}); };
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// verify

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

double max_hemisphere_error(int n, double R, int grid) {
  const ModelGeometry m{euclidean_model(n)};
  const auto p = solve_cmc_graph(m, R, grid);
  double err = 0.0;
  for (std::size_t i = 0; i < p.r.size(); ++i) {
    if (p.r[i] > R - 1e-3) break;
    err = std::max(err, std::abs(p.v[i] - std::sqrt(R * R - p.r[i] * p.r[i])));
  }
  return err;
}

CheckResult check_hemisphere(const VerifySection& v) {
  double err = 0.0;
  for (int n : {2, 3}) {
    for (double R : {0.5, 1.0, 2.0}) err = std::max(err, max_hemisphere_error(n, R, 256));
  }
  return {"hemisphere", err <= v.hemisphere_tol, err, v.hemisphere_tol,
          "max |v_R - sqrt(R^2 - r^2)| on [0, R - 1e-3], euclidean n = 2, 3, R = 0.5, 1, 2"};
}

CheckResult check_cmc(const ModelGeometry& model, const VerifySection& v) {
  const double res = cmc_residual(model, solve_cmc_graph(model, 1.0, 256));
  return {"cmc", res <= v.cmc_tol, res, v.cmc_tol, "residual of the radial operator minus nH(R), R = 1, grid 256"};
}

CheckResult check_supersolution(const ModelGeometry& model, const VerifySection& v) {
  const auto s = verify_supersolution(model, 1.0, 256, radial_operator(model));
  return {"supersolution", s.min_residual >= -v.supersolution_tol, s.min_residual,
          -v.supersolution_tol, "min of d_t u+ + Q[u+] over the 256 x 256 grid, r0 = 1"};
}

CheckResult check_operator(const ModelGeometry& model, const VerifySection& v) {
  const double R = 1.0;
  const double nH = model.n() * model.sphere_mean_curvature(R);
  std::vector<double> errs;
  for (int nr : {32, 64, 128}) {
    const Grid g = make_grid(model, R, nr, 1);
    std::vector<double> radii(g.r.begin(), g.r.end());
    const auto heights = cmc_heights(model, R, radii);
    Field u(g.size());
    for (int i = 0; i <= nr; ++i) u[g.index(i, 0)] = heights[i];
    const Field q = discretize_Q(model, g, u);
    double err = 0.0;
    for (int i = 0; g.r[i] <= 0.75 * R; ++i) {
      const double rho = model.killing().value(g.r[i]);
      const double s = i == 0 ? 0.0 : cmc_slope(model, R, g.r[i]);
      const double W = std::sqrt(1.0 / (rho * rho) + s * s);
      err = std::max(err, std::abs(q[g.index(i, 0)] - W * nH));
    }
    errs.push_back(err);
  }
  const double order = std::min(std::log2(errs[0] / errs[1]), std::log2(errs[1] / errs[2]));
  std::ostringstream detail;
  detail << "observed order of max |Q[v_R] - W nH(R)| on r <= 0.75 R, errors " << errs[0] << ", "
         << errs[1] << ", " << errs[2];
  return {"operator", order >= v.operator_order, order, v.operator_order, detail.str()};
}

CheckResult check_curvature(const VerifySection& v) {
  const ModelGeometry m{euclidean_model(2)};
  const Grid g = make_grid(m, 1.0, 256, 1);
  Field u(g.size());
  for (int i = 0; i <= g.nr; ++i) u[g.index(i, 0)] = std::sqrt(std::max(0.0, 1.0 - g.r[i] * g.r[i]));
  const auto c = second_fundamental_form(m, g, u);
  double err = 0.0;
  for (int i = 0; g.r[i] <= 0.9; ++i) err = std::max(err, std::abs(c.A_squared[g.index(i, 0)] - 2.0));
  const auto flat = second_fundamental_form(m, g, Field(g.size(), 0.0));
  bool zero = true;
  for (int i = 0; i < g.nr; ++i) zero = zero && flat.A_squared[g.index(i, 0)] == 0.0;
  return {"curvature", err <= v.curvature_tol && zero, err, v.curvature_tol,
          zero ? "max ||A|^2 - 2| on the unit hemisphere, r <= 0.9; flat leaf gives 0"
               : "flat leaf gives nonzero |A|^2"};
}

CheckResult check_constants() {
  const ModelGeometry eu{euclidean_model(2)};
  const double cap = c0_height_cap(eu, 1.0, 3);
  const double mu = interior_gradient_bound(eu, 1.0, 1.0, 1.0 - 1e-8, 17.0).mu;
  const double curv = curvature_bound(0.1, 2.0, 1.0, 1.0, 2.0, 2.0, 1.0);
  const double curv_expected = 12.6491 * std::sqrt(6.0);
  const double dev = std::max({std::abs(cap - 3.0), std::abs(mu - 0.783), std::abs(curv - curv_expected)});
  std::ostringstream detail;
  detail << "c0 cap " << cap << " (3), mu " << mu << " (0.783), curvature bound " << curv << " ("
         << curv_expected << ")";
  // the cap is 3 in exact arithmetic; the quadrature-backed volume leaves a few ulp
  return {"constants", std::abs(cap - 3.0) <= 1e-12 && dev <= 1e-3, dev, 1e-3, detail.str()};
}

ExhaustionPlan exhaustion_plan(const ModelGeometry& model, const ExhaustSection& e) {
  ExhaustionPlan plan = build_ladder(model, e.r0, e.rungs, e.growth);
  plan.tol = e.tol;
  plan.rings_per_unit = e.rings_per_unit;
  plan.ntheta = e.ntheta;
  plan.control.dt_max = e.dt_max;
  plan.stop_early = e.stop_early;
  return plan;
}

std::function<double(double, double)> initial_data(const std::string& u0,
                                                   const std::function<double(double)>& phi,
                                                   double blend_radius) {
  if (!u0.empty()) return polar_function(u0);
  return blended_extension(phi, blend_radius);
}

CheckResult check_exhaust(const ModelGeometry& model, const RunConfig& c) {
  const auto plan = exhaustion_plan(model, c.exhaust);
  const auto phi = angular_function(c.problem.phi);
  const auto rep = run_exhaustion(plan, phi, initial_data(c.problem.u0, phi, c.exhaust.blend_radius));
  const bool ok = rep.verdict && rep.gradient_check && rep.curvature_check && rep.height_check;
  return {"exhaust", ok, rep.d.empty() ? 0.0 : rep.d.back(), c.exhaust.tol,
          "last rung difference on the observation cylinder; one-sided checks " +
              std::string(rep.gradient_check && rep.curvature_check && rep.height_check ? "pass" : "fail")};
}

// ---------------------------------------------------------------------------
// subcommands

int run_model_info(const CommonOptions& o, int samples, std::ostream& out) {
  const RunConfig c = resolve_config(o);
  validate_config(c);
  if (dry_run(o, c, out)) return kExitOk;
  const ModelGeometry model{model_spec(c.model)};
  emit_json(o, model_info_report(model, c.model.name, samples), out);
  return kExitOk;
}

int run_cmc(const CommonOptions& o, double R, int grid, const std::vector<double>& at, bool json,
            std::ostream& out) {
  const RunConfig c = resolve_config(o);
  validate_config(c);
  if (dry_run(o, c, out)) return kExitOk;
  const ModelGeometry model{model_spec(c.model)};
  const CmcProfile profile = solve_cmc_graph(model, R, grid);
  write_svg(o.svg_path, svg_curves({{"v_R", profile.r, profile.v}},
                                   "radial CMC graph, R = " + format_double(R), "r", "v"));
  if (json) {
    emit_json(o, cmc_report(model, c.model.name, profile), out);
    return kExitOk;
  }
  if (!at.empty()) {
    std::string csv = csv_row({"r", "v", "v_prime"});
    for (double r : at) {
      if (!(r >= 0.0 && r <= R)) throw UsageError("--at radius outside [0, R]: " + format_double(r));
      csv += csv_row({format_double(r), format_double(cmc_height(model, R, r)),
                      format_double(r < R ? cmc_slope(model, R, r) : -INFINITY)});
    }
    emit(o, csv, out);
    return kExitOk;
  }
  emit(o, cmc_csv(profile), out);
  return kExitOk;
}

struct BarrierOptions {
  double r0 = 1.0;
  double t = 0.5;
  int points = 64;
  double sup_u0 = 0.5;
  int l0 = 3;
  bool sc = false;
  double distance = 1.0;
  double direction = 0.0;
  double C = 1.0;
  double d0 = 2.0;
  int samples = 200;
  double tol = 1e-3;
};

int run_barrier(const CommonOptions& o, const BarrierOptions& b, std::ostream& out) {
  const RunConfig c = resolve_config(o);
  validate_config(c);
  if (dry_run(o, c, out)) return kExitOk;
  const ModelGeometry model{model_spec(c.model)};
  Json j;
  j["kind"] = "barrier";
  j["model"] = model_json(model, c.model.name);
  j["r0"] = b.r0;
  j["t"] = b.t;
  const double radius = mu_of_t(model, b.r0, b.t);
  j["radius"] = radius;
  j["radius_ode"] = radius_by_ode(model, b.r0, b.t);
  Json caps = Json::array();
  for (int i = 0; i <= 8; ++i) {
    const double r = b.r0 * i / 8.0;
    caps.push_back({{"r", r}, {"u_plus", eval_u_plus(model, b.r0, r, b.t)}});
  }
  j["u_plus"] = std::move(caps);
  const auto s = verify_supersolution(model, b.r0, b.points, radial_operator(model));
  j["supersolution"] = {{"points", b.points},
                        {"min_residual", s.min_residual},
                        {"coarse_min_residual", s.coarse_min_residual},
                        {"tol_num", s.tol_num},
                        {"passed", s.passed}};
  const auto hb = height_bounds(model, b.r0, b.t, b.sup_u0);
  j["height_bounds"] = {{"sup_u0", hb.sup_u0},
                        {"cap_height", hb.cap_height},
                        {"final_radius", hb.final_radius},
                        {"upper_at_o", hb.upper(0.0)},
                        {"lower_at_o", hb.lower(0.0)}};
  bool passed = s.min_residual >= -b.tol;
  try {
    j["c0_cap"] = {{"l0", b.l0}, {"value", c0_height_cap(model, b.r0, b.l0)}};
  } catch (const Error& e) {
    j["c0_cap"] = {{"l0", b.l0}, {"value", nullptr}, {"error", e.what()}};
  }
  if (b.sc) {
    try {
      const ScBarrier bar = make_sc_barrier(model, {b.distance, b.direction}, b.C, b.d0);
      const auto eta = [&bar](double r, double theta) { return bar.eta(r, theta); };
      double worst = -INFINITY;
      for (const auto& [r, theta] : bar.window_samples(b.samples, o.seed)) {
        worst = std::max(worst, pointwise_Q(model, eta, r, theta, 1e-3));
      }
      j["sc_barrier"] = {{"alpha", bar.alpha()},
                         {"C1", bar.C1()},
                         {"samples", b.samples},
                         {"max_Q", worst},
                         {"tol", b.tol},
                         {"passed", worst <= b.tol}};
      passed = passed && worst <= b.tol;
    } catch (const GeometryError& e) {
      j["sc_barrier"] = {{"error", e.what()}, {"passed", false}};
      passed = false;
    }
  }
  j["passed"] = passed;
  emit_json(o, j, out);
  return passed ? kExitOk : kExitCheckFailed;
}

struct FlowOptions {
  std::optional<double> R, T, cfl, dt_max;
  std::optional<int> nr, ntheta, snapshot_every;
  std::optional<std::string> phi, u0, scheme;
  std::string out_dir;
};

int run_flow(const CommonOptions& o, const FlowOptions& f, std::ostream& out) {
  RunConfig c = resolve_config(o);
  if (f.R) c.grid.R = *f.R;
  if (f.nr) c.grid.nr = *f.nr;
  if (f.ntheta) c.grid.ntheta = *f.ntheta;
  if (f.T) c.problem.T = *f.T;
  if (f.phi) c.problem.phi = *f.phi;
  if (f.u0) c.problem.u0 = *f.u0;
  if (f.scheme) c.control.scheme = *f.scheme;
  if (f.cfl) c.control.cfl = *f.cfl;
  if (f.dt_max) c.control.dt_max = *f.dt_max;
  if (f.snapshot_every) c.problem.snapshot_every = *f.snapshot_every;
  validate_config(c);
  if (dry_run(o, c, out)) return kExitOk;
  const ModelGeometry model{model_spec(c.model)};
  const auto phi = angular_function(c.problem.phi);
  const StepControl control = step_control(c.control);
  const double blend = std::min(1.0, 0.5 * c.grid.R);

  Trajectory traj;
  if (c.grid.ntheta == 1) {
    const Expr phi_expr = parse_expression(c.problem.phi);
    if (phi_expr.uses_theta()) throw ConfigError("ntheta = 1 needs constant boundary data");
    const double value = phi(0.0);
    std::function<double(double)> u0 = [value](double) { return value; };
    if (!c.problem.u0.empty()) {
      const Expr e = parse_expression(c.problem.u0);
      if (e.uses_theta() || e.uses_t()) throw ConfigError("ntheta = 1 needs radial initial data");
      u0 = [e](double r) { return e.eval({r, 0.0, 0.0}); };
    }
    const auto problem = make_radial_problem(model, c.grid.R, value, u0, c.problem.T);
    traj = radial_solve(problem, c.grid.nr, control, c.problem.snapshot_every);
  } else {
    const auto problem = make_ball_problem(model, c.grid.R, phi,
                                           initial_data(c.problem.u0, phi, blend), c.problem.T);
    const Grid grid = make_grid(model, c.grid.R, c.grid.nr, c.grid.ntheta);
    traj = solve_ball(problem, grid, control, c.problem.snapshot_every);
  }
  Json j = flow_report(model, c.model.name, traj);
  if (!f.out_dir.empty()) {
    write_run(f.out_dir, model, traj);
    j["run_directory"] = f.out_dir;
  }
  write_svg(o.svg_path, svg_heatmap(traj.grid, traj.snapshots.back().u,
                                    "u at t = " + format_double(traj.snapshots.back().t)));
  emit_json(o, j, out);
  return kExitOk;
}

struct ExhaustOptions {
  std::optional<double> r0, tol, dt_max, growth;
  std::optional<int> rungs, rings_per_unit, ntheta;
  std::optional<std::string> phi;
  bool no_stop_early = false;
};

int run_exhaust(const CommonOptions& o, const ExhaustOptions& x, std::ostream& out) {
  RunConfig c = resolve_config(o);
  if (x.r0) c.exhaust.r0 = *x.r0;
  if (x.tol) c.exhaust.tol = *x.tol;
  if (x.dt_max) c.exhaust.dt_max = *x.dt_max;
  if (x.growth) c.exhaust.growth = *x.growth;
  if (x.rungs) c.exhaust.rungs = *x.rungs;
  if (x.rings_per_unit) c.exhaust.rings_per_unit = *x.rings_per_unit;
  if (x.ntheta) c.exhaust.ntheta = *x.ntheta;
  if (x.phi) c.problem.phi = *x.phi;
  if (x.no_stop_early) c.exhaust.stop_early = false;
  validate_config(c);
  if (dry_run(o, c, out)) return kExitOk;
  const ModelGeometry model{model_spec(c.model)};
  const auto plan = exhaustion_plan(model, c.exhaust);
  const auto phi = angular_function(c.problem.phi);
  const auto rep = run_exhaustion(plan, phi, initial_data(c.problem.u0, phi, c.exhaust.blend_radius));
  emit_json(o, exhaust_report(model, c.model.name, plan, rep), out);
  const bool ok = rep.verdict && rep.gradient_check && rep.curvature_check && rep.height_check;
  return ok ? kExitOk : kExitCheckFailed;
}

int run_verify(const CommonOptions& o, bool all, std::vector<std::string> checks, std::ostream& out) {
  const RunConfig c = resolve_config(o);
  validate_config(c);
  if (dry_run(o, c, out)) return kExitOk;
  if (all) checks = {"all"};
  if (checks.empty()) checks = c.verify.checks;
  std::vector<std::string> selected;
  for (const auto& name : checks) {
    if (name == "all") {
      // everything except the exhaustion run, which takes minutes
      for (const auto& k : verify_check_names()) {
        if (k != "exhaust") selected.push_back(k);
      }
      continue;
    }
    const auto& known = verify_check_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw UsageError("unknown check \"" + name + "\"");
    }
    selected.push_back(name);
  }
  const ModelGeometry model{model_spec(c.model)};
  Json results = Json::array();
  bool all_passed = true;
  for (const auto& name : selected) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      if (name == "hemisphere") r = check_hemisphere(c.verify);
      else if (name == "cmc") r = check_cmc(model, c.verify);
      else if (name == "supersolution") r = check_supersolution(model, c.verify);
      else if (name == "operator") r = check_operator(model, c.verify);
      else if (name == "curvature") r = check_curvature(c.verify);
      else if (name == "constants") r = check_constants();
      else r = check_exhaust(model, c);
    } catch (const Error& e) {
      r = {name, false, NAN, NAN, std::string("error: ") + e.what()};
    }
    r.name = name;
    all_passed = all_passed && r.passed;
    results.push_back({{"name", r.name},
                       {"passed", r.passed},
                       {"value", std::isfinite(r.value) ? Json(r.value) : Json(nullptr)},
                       {"threshold", std::isfinite(r.threshold) ? Json(r.threshold) : Json(nullptr)},
                       {"detail", r.detail},
                       {"seconds", seconds_since(start)}});
  }
  Json j;
  j["kind"] = "verify";
  j["model"] = model_json(model, c.model.name);
  j["checks"] = std::move(results);
  j["passed"] = all_passed;
  emit_json(o, j, out);
  return all_passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int apply_thread_cap() {
  int cap = omp_get_max_threads();
  if (const char* env = std::getenv("KILLINGFLOW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) cap = static_cast<int>(std::min<long>(v, cap));
  }
  omp_set_num_threads(cap);
  return cap;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean curvature flow of Killing graphs: solver and verification harness",
               "killingflow"};
  app.require_subcommand(1);
  app.fallthrough(false);

  CommonOptions common;
  int info_samples = 16;
  double cmc_R = 1.0;
  int cmc_grid = 256;
  std::vector<double> cmc_at;
  bool cmc_json = false;
  BarrierOptions barrier;
  FlowOptions flow;
  ExhaustOptions exhaust;
  bool verify_all = false;
  std::vector<std::string> verify_checks;

  auto* info = app.add_subcommand("model-info", "describe a model and sample its radial quantities");
  add_common(info, common);
  info->add_option("--samples", info_samples, "number of radii in (0, 4]")->check(CLI::Range(1, 10000));

  auto* cmc = app.add_subcommand("cmc", "radial constant mean curvature graph v_R as CSV");
  add_common(cmc, common);
  cmc->add_option("--R", cmc_R, "ball radius")->check(kFinite)->check(CLI::PositiveNumber);
  cmc->add_option("--grid", cmc_grid, "intervals of the clustered grid")->check(CLI::Range(16, 1000000));
  cmc->add_option("--at", cmc_at, "evaluate at these radii instead of the grid");
  cmc->add_flag("--json", cmc_json, "JSON report instead of CSV");
  cmc->add_option("--svg", common.svg_path, "draw the profile");

  auto* bar = app.add_subcommand("barrier", "supersolution flow, height bounds and the barrier at infinity");
  add_common(bar, common);
  bar->add_option("--r0", barrier.r0, "initial radius")->check(kFinite)->check(CLI::PositiveNumber);
  bar->add_option("--t", barrier.t, "time")->check(kFinite)->check(CLI::NonNegativeNumber);
  bar->add_option("--points", barrier.points, "supersolution grid points per axis")->check(CLI::Range(64, 1024));
  bar->add_option("--sup-u0", barrier.sup_u0, "sup |u0| for the height bounds")->check(kFinite)->check(CLI::NonNegativeNumber);
  bar->add_option("--l0", barrier.l0, "growth factor of the height cap")->check(CLI::Range(1, 1000));
  bar->add_flag("--sc", barrier.sc, "evaluate the barrier at infinity (n = 2 hyperbolic bases)");
  bar->add_option("--distance", barrier.distance, "distance from o to the boundary geodesic")->check(kFinite);
  bar->add_option("--direction", barrier.direction, "polar angle of the perpendicular")->check(kFinite);
  bar->add_option("--C", barrier.C, "barrier amplitude")->check(kFinite);
  bar->add_option("--d0", barrier.d0, "inner distance of U_0")->check(kFinite);
  bar->add_option("--samples", barrier.samples, "sample points in U_0")->check(CLI::Range(1, 100000));
  bar->add_option("--tol", barrier.tol, "tolerance of the one-sided checks")->check(kFinite)->check(CLI::PositiveNumber);

  auto* fl = app.add_subcommand("flow", "solve one Dirichlet problem on a ball");
  add_common(fl, common);
  fl->add_option("--R", flow.R, "ball radius")->check(kFinite);
  fl->add_option("--nr", flow.nr, "rings");
  fl->add_option("--ntheta", flow.ntheta, "angles per ring (1 = radial)");
  fl->add_option("--T", flow.T, "final time (0 = zeta(R)/2)")->check(kFinite);
  fl->add_option("--phi", flow.phi, "boundary data expression in theta");
  fl->add_option("--u0", flow.u0, "initial data expression in r, theta");
  fl->add_option("--scheme", flow.scheme, "explicit_euler | semi_implicit");
  fl->add_option("--cfl", flow.cfl, "CFL factor")->check(kFinite);
  fl->add_option("--dt-max", flow.dt_max, "largest step")->check(kFinite);
  fl->add_option("--snapshot-every", flow.snapshot_every, "steps between snapshots");
  fl->add_option("--out-dir", flow.out_dir, "write snapshot CSVs and a manifest here");
  fl->add_option("--svg", common.svg_path, "draw the final field");

  auto* ex = app.add_subcommand("exhaust", "ball exhaustion with convergence report");
  add_common(ex, common);
  ex->add_option("--r0", exhaust.r0, "observation radius")->check(kFinite);
  ex->add_option("--rungs", exhaust.rungs, "ladder length");
  ex->add_option("--growth", exhaust.growth, "ladder growth factor")->check(kFinite);
  ex->add_option("--tol", exhaust.tol, "Cauchy tolerance")->check(kFinite);
  ex->add_option("--rings-per-unit", exhaust.rings_per_unit, "radial resolution");
  ex->add_option("--ntheta", exhaust.ntheta, "angles per ring");
  ex->add_option("--dt-max", exhaust.dt_max, "largest step")->check(kFinite);
  ex->add_option("--phi", exhaust.phi, "boundary data expression in theta");
  ex->add_flag("--no-stop-early", exhaust.no_stop_early, "solve every rung");

  auto* ve = app.add_subcommand("verify", "run verification checks");
  add_common(ve, common);
  ve->add_flag("--all", verify_all, "every check except exhaust");
  ve->add_option("--check", verify_checks, "check name (repeatable)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    apply_thread_cap();
    if (info->parsed()) return run_model_info(common, info_samples, out);
    if (cmc->parsed()) return run_cmc(common, cmc_R, cmc_grid, cmc_at, cmc_json, out);
    if (bar->parsed()) return run_barrier(common, barrier, out);
    if (fl->parsed()) return run_flow(common, flow, out);
    if (ex->parsed()) return run_exhaust(common, exhaust, out);
    if (ve->parsed()) return run_verify(common, verify_all, verify_checks, out);
    err << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ExprSyntaxError& e) {
    err << "expression error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnknownIdentifierError& e) {
    err << "expression error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TableFormatError& e) {
    err << "table error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "model error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

}  // namespace kflow
