// Acceptance suite: one line per criterion, exit status 0 iff every line passes.
// Expected values come from closed forms in this file or tests/oracles.hpp.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "killingflow/barriers.hpp"
#include "killingflow/cmc_radial.hpp"
#include "killingflow/errors.hpp"
#include "killingflow/exhaustion.hpp"
#include "killingflow/flow.hpp"

using namespace kflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Line {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Line& line) {
  std::printf("[%s] %2d %-28s %s\n", line.pass ? "PASS" : "FAIL", id, name.c_str(),
              line.detail.c_str());
  std::fflush(stdout);
  if (!line.pass) ++failures;
}

template <class F>
void criterion(int id, const std::string& name, F&& body) {
  Line line;
  try {
    line = body();
  } catch (const std::exception& e) {
    line = {false, std::string("exception: ") + e.what()};
  }
  report(id, name, line);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

Field sample_radial(const Grid& g, const std::function<double(double)>& f) {
  Field u(g.size());
  u[0] = f(0.0);
  for (int i = 1; i <= g.nr; ++i) {
    for (int j = 0; j < g.ntheta; ++j) u[g.index(i, j)] = f(g.r[i]);
  }
  return u;
}

// ---------------------------------------------------------------------------

Line hemisphere() {
  double worst = 0.0, slowest = 0.0;
  for (int n : {2, 3}) {
    const ModelGeometry m{euclidean_model(n)};
    for (double R : {0.5, 1.0, 2.0}) {
      const auto start = Clock::now();
      const auto p = solve_cmc_graph(m, R, 256);
      slowest = std::max(slowest, seconds(start));
      for (std::size_t i = 0; i < p.r.size() && p.r[i] <= R - 1e-3; ++i) {
        worst = std::max(worst, std::abs(p.v[i] - std::sqrt(R * R - p.r[i] * p.r[i])));
      }
    }
  }
  return {worst <= 1e-7 && slowest < 1.0,
          "max error " + fmt(worst) + " <= 1e-7, slowest profile " + fmt(slowest) + " s < 1 s"};
}

constexpr double kRoundoffFloor = 1e-10;

Line cmc_constancy() {
  const auto start = Clock::now();
  std::string detail;
  bool pass = true;
  for (const auto& spec : {euclidean_model(2), hyperbolic_model(2)}) {
    const ModelGeometry m{spec};
    const double coarse = cmc_residual(m, solve_cmc_graph(m, 1.0, 256));
    const double fine = cmc_residual(m, solve_cmc_graph(m, 1.0, 512));
    // A residual already at roundoff cannot shrink under doubling, so the
    // order is only required while the fine residual is above that floor.
    const bool at_floor = coarse <= kRoundoffFloor && fine <= kRoundoffFloor;
    const double p = order(coarse, fine);
    pass = pass && coarse <= 1e-3 && (at_floor || p >= 1.8);
    detail += m.killing().spec().kind == ProfileKind::constant ? "euclidean" : "hyperbolic";
    detail += " residual " + fmt(coarse) + " -> " + fmt(fine) +
              (at_floor ? " (roundoff floor)" : " order " + fmt(p)) + "; ";
  }
  const double t = seconds(start);
  return {pass && t < 5.0, detail + fmt(t) + " s < 5 s"};
}

Line supersolution_law() {
  const auto start = Clock::now();
  double worst_radius = 0.0;
  for (double r0 : {0.5, 1.0, 2.0}) {
    for (double t : {0.05, 0.5, 1.0, 2.0}) {
      for (int n : {2, 3}) {
        const ModelGeometry eu{euclidean_model(n)};
        worst_radius = std::max(worst_radius,
                                std::abs(mu_of_t(eu, r0, t) - std::sqrt(r0 * r0 + 2.0 * n * t)));
      }
      const ModelGeometry hy{hyperbolic_model(2)};
      worst_radius = std::max(
          worst_radius, std::abs(mu_of_t(hy, r0, t) - std::acosh(std::cosh(r0) * std::exp(2.0 * t))));
    }
  }
  double min_residual = std::numeric_limits<double>::infinity();
  for (const auto& spec : {euclidean_model(2), hyperbolic_model(2)}) {
    const ModelGeometry m{spec};
    min_residual = std::min(min_residual,
                            verify_supersolution(m, 1.0, 256, radial_operator(m)).min_residual);
  }
  const double t = seconds(start);
  return {worst_radius <= 1e-8 && min_residual >= -1e-3 && t < 10.0,
          "radius error " + fmt(worst_radius) + " <= 1e-8, min residual " + fmt(min_residual) +
              " >= -1e-3, " + fmt(t) + " s < 10 s"};
}

Line operator_correctness() {
  const auto start = Clock::now();
  const double R = 1.0;
  struct Case {
    ModelSpec spec;
    std::function<double(double)> height, slope;
    double nH;
    const char* name;
  };
  const std::vector<Case> cases{
      {euclidean_model(2), [R](double r) { return std::sqrt(R * R - r * r); },
       [R](double r) { return -r / std::sqrt(R * R - r * r); }, -2.0 / R, "euclidean"},
      {hyperbolic_model(2), [R](double r) { return oracle::hyperbolic_cmc_height(R, r); },
       [R](double r) { return oracle::hyperbolic_cmc_slope(R, r); }, -2.0 / std::tanh(R),
       "hyperbolic"},
  };
  double worst_order = std::numeric_limits<double>::infinity();
  std::string detail;
  for (const auto& c : cases) {
    const ModelGeometry m{c.spec};
    for (int nt : {1, 16}) {
      std::vector<double> errs;
      for (int nr : {32, 64, 128}) {
        const Grid g = make_grid(m, R, nr, nt);
        const Field q = discretize_Q(m, g, sample_radial(g, c.height));
        double err = 0.0;
        for (int i = 0; g.r[i] <= 0.75 * R; ++i) {
          const double rho = m.killing().value(g.r[i]);
          const double s = i == 0 ? 0.0 : c.slope(g.r[i]);
          const double W = std::sqrt(1.0 / (rho * rho) + s * s);
          for (int j = 0; j < (i == 0 ? 1 : nt); ++j) {
            err = std::max(err, std::abs(q[g.index(i, j)] - W * c.nH));
          }
        }
        errs.push_back(err);
      }
      const double p = std::min(order(errs[0], errs[1]), order(errs[1], errs[2]));
      worst_order = std::min(worst_order, p);
      detail += std::string(c.name) + (nt == 1 ? " radial " : " polar ") + fmt(p) + "; ";
    }
  }
  const double t = seconds(start);
  return {worst_order >= 1.8 && t < 30.0,
          "min order " + fmt(worst_order) + " >= 1.8 (" + detail + fmt(t) + " s < 30 s)"};
}

Line height_conformance() {
  const auto start = Clock::now();
  const double r0 = 1.0;
  struct Data {
    double boundary;
    std::function<double(double)> u0;
  };
  double margin = std::numeric_limits<double>::infinity();
  int runs = 0;
  for (const auto& spec : {euclidean_model(2), hyperbolic_model(2), hyperbolic_base_model(2)}) {
    const ModelGeometry m{spec};
    const double T = 0.5 * m.warp_primitive(build_ladder(m, r0, 2).ladder.front());
    const std::vector<Data> data{
        {0.0, [&m, r0](double r) { return cmc_height(m, r0, r); }},
        {0.0, [](double r) { return 0.5 * (1.0 - r * r); }},
        {0.0, [](double r) { return -0.3 * std::pow(1.0 - r * r, 3); }},
        {0.2, [](double r) { return 0.2 + 0.4 * (1.0 - r * r) * std::cos(2.0 * r); }},
    };
    for (const auto& d : data) {
      StepControl control;
      control.dt_max = 2e-3;
      const auto problem = make_radial_problem(m, r0, d.boundary, d.u0, T);
      const auto traj = radial_solve(problem, 32, control, 10);
      double sup0 = -INFINITY, inf0 = INFINITY;
      for (double v : traj.snapshots.front().u) {
        sup0 = std::max(sup0, v);
        inf0 = std::min(inf0, v);
      }
      const auto bounds = height_bounds(m, r0, T, sup0, inf0);
      std::vector<double> upper, lower;
      for (double r : traj.grid.r) {
        upper.push_back(bounds.upper(r));
        lower.push_back(bounds.lower(r));
      }
      for (const auto& s : traj.snapshots) {
        for (int i = 0; i <= traj.grid.nr; ++i) {
          margin = std::min({margin, upper[i] - s.u[i], s.u[i] - lower[i]});
        }
      }
      ++runs;
    }
  }
  const double t = seconds(start);
  return {margin >= -1e-3 && t < 60.0, std::to_string(runs) + " runs, min margin " + fmt(margin) +
                                           " >= -1e-3, " + fmt(t) + " s < 60 s"};
}

// Smooth data on the unit disk with u0(1, .) = phi.
struct RandomData {
  double b[3], a[4];
  double phi(double t) const { return b[0] + b[1] * std::cos(t) + b[2] * std::sin(2.0 * t); }
  double u0(double r, double t) const {
    const double ext = b[0] + b[1] * r * std::cos(t) + b[2] * r * r * std::sin(2.0 * t);
    return ext + (1.0 - r * r) * (a[0] + a[1] * r * std::cos(t) + a[2] * r * std::sin(t) +
                                  a[3] * r * r * std::cos(2.0 * t));
  }
};

Line comparison_principle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> coef(-0.6, 0.6), gap(0.0, 0.3);
  double worst = -INFINITY;
  int pairs = 0;
  for (const auto& spec : {euclidean_model(2), hyperbolic_model(2)}) {
    const ModelGeometry m{spec};
    const Grid g = make_grid(m, 1.0, 16, 32);
    StepControl control;
    control.dt_max = 4e-3;
    for (int trial = 0; trial < 10; ++trial, ++pairs) {
      RandomData lo;
      for (double& v : lo.b) v = coef(rng);
      for (double& v : lo.a) v = coef(rng);
      RandomData hi = lo;
      hi.b[0] += gap(rng);
      hi.a[0] += 0.5 * gap(rng);
      const auto pa = make_ball_problem(
          m, 1.0, [lo](double t) { return lo.phi(t); },
          [lo](double r, double t) { return lo.u0(r, t); }, 0.1);
      const auto pb = make_ball_problem(
          m, 1.0, [hi](double t) { return hi.phi(t); },
          [hi](double r, double t) { return hi.u0(r, t); }, 0.1);
      const auto ta = solve_ball(pa, g, control, 5);
      const auto tb = solve_ball(pb, g, control, 5);
      for (std::size_t s = 0; s < ta.snapshots.size(); ++s) {
        for (std::size_t k = 0; k < g.size(); ++k) {
          worst = std::max(worst, ta.snapshots[s].u[k] - tb.snapshots[s].u[k]);
        }
      }
    }
  }
  const double t = seconds(start);
  return {pairs == 20 && worst <= 1e-9 && t < 120.0,
          std::to_string(pairs) + " pairs, max(u_lo - u_hi) " + fmt(worst) + " <= 1e-9, " + fmt(t) +
              " s < 120 s"};
}

Line second_fundamental_form_check() {
  const auto start = Clock::now();
  const ModelGeometry m{euclidean_model(2)};
  double err = 0.0;
  for (int nt : {1, 16}) {
    const Grid g = make_grid(m, 1.0, 256, nt);
    const auto c = second_fundamental_form(
        m, g, sample_radial(g, [](double r) { return std::sqrt(std::max(0.0, 1.0 - r * r)); }));
    for (int i = 0; g.r[i] <= 0.9; ++i) {
      for (int j = 0; j < (i == 0 ? 1 : nt); ++j) {
        err = std::max(err, std::abs(c.A_squared[g.index(i, j)] - 2.0));
      }
    }
  }
  const Grid g = make_grid(m, 1.0, 64, 16);
  const auto flat = second_fundamental_form(m, g, Field(g.size(), 0.0));
  bool zero = true;
  for (int i = 0; i < g.nr; ++i) {
    for (int j = 0; j < (i == 0 ? 1 : g.ntheta); ++j) zero = zero && flat.A_squared[g.index(i, j)] == 0.0;
  }
  const double t = seconds(start);
  return {err <= 1e-3 && zero && t < 5.0,
          "max ||A|^2 - 2| " + fmt(err) + " <= 1e-3 on r <= 0.9, flat leaf " +
              (zero ? "exactly 0" : "NONZERO") + ", " + fmt(t) + " s < 5 s"};
}

Line evolution_identities() {
  const auto start = Clock::now();
  const ModelGeometry m{euclidean_model(2)};
  const auto p = make_radial_problem(
      m, 1.0, 0.0, [](double r) { return 0.5 * std::pow(1.0 - r * r, 3); }, 0.05);
  std::vector<IdentityReport> reps;
  for (int nr : {32, 64, 128}) {
    StepControl control;
    control.dt_max = 0.5 / (nr * nr);
    reps.push_back(residual_identities(m, radial_solve(p, nr, control, 4)));
  }
  double evolW = INFINITY, par_s = INFINITY;
  for (std::size_t k = 1; k < reps.size(); ++k) {
    evolW = std::min(evolW, order(reps[k - 1].evolW_max, reps[k].evolW_max));
    par_s = std::min(par_s, order(reps[k - 1].par_s_max, reps[k].par_s_max));
  }
  const double slack = reps.back().par_zeta_min_slack;
  const double t = seconds(start);
  return {evolW >= 1.0 && par_s >= 1.0 && slack >= -1e-3 && t < 120.0,
          "orders evolW " + fmt(evolW) + ", par-s " + fmt(par_s) + " >= 1; par-zeta slack " +
              fmt(slack) + " >= -1e-3; " + fmt(t) + " s < 120 s"};
}

Line estimate_constants_check() {
  const auto start = Clock::now();
  const ModelGeometry eu{euclidean_model(2)};
  const double cap = c0_height_cap(eu, 1.0, 3);
  const double mu = interior_gradient_bound(eu, 1.0, 1.0, 1.0 - 1e-8, 17.0).mu;
  const double curv = curvature_bound(0.1, 2.0, 1.0, 1.0, 2.0, 2.0, 1.0);
  const double curv_expected = 12.6491 * std::sqrt(6.0);
  const double t = seconds(start);
  // "exactly 3" is read as equal up to the roundoff of the volume quadrature
  const bool pass = std::abs(cap - 3.0) <= 1e-12 && std::abs(mu - 0.783) <= 1e-3 &&
                    std::abs(curv - curv_expected) <= 1e-3 && t < 1.0;
  return {pass, "c0 cap " + std::to_string(cap) + " (|cap - 3| = " + fmt(std::abs(cap - 3.0)) +
                    "), mu " + fmt(mu) + ", curvature bound " + std::to_string(curv) + " vs " +
                    std::to_string(curv_expected)};
}

struct ExhaustionRun {
  std::string model;
  ConvergenceReport report;
  double seconds = 0.0;
};
std::vector<ExhaustionRun> exhaustion_runs;

Line exhaustion_convergence() {
  const auto start = Clock::now();
  const AngularData phi = [](double theta) { return 0.5 * std::cos(theta); };
  std::string detail;
  bool pass = true;
  for (const auto& [name, spec] : {std::pair{"euclidean", euclidean_model(2)},
                                   std::pair{"hyperbolic", hyperbolic_model(2)}}) {
    const ModelGeometry m{spec};
    ExhaustionPlan plan = build_ladder(m, 1.0, 4);
    plan.stop_early = false;  // the criterion asks for the full four-rung ladder
    const auto t0 = Clock::now();
    ExhaustionRun run{name, run_exhaustion(plan, phi, blended_extension(phi, 1.0)), 0.0};
    run.seconds = seconds(t0);
    const auto& d = run.report.d;
    bool decreasing = d.size() == 3;
    for (std::size_t k = 1; k < d.size(); ++k) decreasing = decreasing && d[k] < d[k - 1];
    const bool ok = decreasing && !d.empty() && d.back() < 1e-3;
    pass = pass && ok;
    detail += std::string(name) + " d =";
    for (double v : d) detail += " " + fmt(v);
    detail += " (" + fmt(run.seconds) + " s); ";
    exhaustion_runs.push_back(std::move(run));
  }
  const double t = seconds(start);
  return {pass && t < 600.0, detail + "strictly decreasing, last < 1e-3, " + fmt(t) + " s < 600 s"};
}

Line barrier_at_infinity() {
  const auto start = Clock::now();
  const ModelGeometry hy{hyperbolic_model(2)};
  const auto bar = make_sc_barrier(hy, {1.0, 0.4}, 1.0, 2.0);
  const auto eta = [&bar](double r, double theta) { return bar.eta(r, theta); };
  double worst = -INFINITY;
  const auto points = bar.window_samples(200, 11);
  for (const auto& [r, theta] : points) worst = std::max(worst, pointwise_Q(hy, eta, r, theta, 1e-3));
  bool raised = false;
  try {
    const ModelGeometry base{hyperbolic_base_model(2)};
    make_sc_barrier(base, {1.0, 0.4}, 1.0, 2.0);
  } catch (const GeometryError&) {
    raised = true;
  }
  const double t = seconds(start);
  return {points.size() == 200 && worst <= 1e-3 && raised && t < 10.0,
          "max Q[eta] " + fmt(worst) + " <= 1e-3 at " + std::to_string(points.size()) +
              " points; constant Killing length " + (raised ? "raises GeometryError" : "DID NOT RAISE") +
              "; " + fmt(t) + " s < 10 s"};
}

Line one_sided_checks() {
  if (exhaustion_runs.size() != 2) return {false, "exhaustion runs missing"};
  bool pass = true;
  std::string detail;
  for (const auto& run : exhaustion_runs) {
    const auto& rep = run.report;
    double grad = 0.0, curv = 0.0, bound = INFINITY;
    for (const auto& rung : rep.rungs) {
      grad = std::max(grad, rung.max_grad);
      curv = std::max(curv, rung.max_A);
      bound = std::min(bound, rung.curvature_bound);
    }
    const bool ok = rep.gradient_check && rep.curvature_check && rep.height_check;
    pass = pass && ok;
    detail += run.model + ": max|grad u| " + fmt(grad) + " vs log bound " +
              fmt(rep.log_gradient_bound) + ", max|A| " + fmt(curv) + " <= " + fmt(bound) +
              (ok ? "" : " (" + rep.estimate_note + ")") + "; ";
  }
  return {pass, detail};
}

}  // namespace

int main() {
  criterion(1, "hemisphere oracle", hemisphere);
  criterion(2, "CMC constancy", cmc_constancy);
  criterion(3, "supersolution law", supersolution_law);
  criterion(4, "operator correctness", operator_correctness);
  criterion(5, "height-estimate conformance", height_conformance);
  criterion(6, "comparison principle", comparison_principle);
  criterion(7, "second fundamental form", second_fundamental_form_check);
  criterion(8, "evolution identities", evolution_identities);
  criterion(9, "estimate constants", estimate_constants_check);
  criterion(10, "exhaustion convergence", exhaustion_convergence);
  criterion(11, "barrier at infinity", barrier_at_infinity);
  criterion(12, "SC/estimate one-sided checks", one_sided_checks);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
