#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "killingflow/barriers.hpp"
#include "killingflow/cmc_radial.hpp"
#include "killingflow/exhaustion.hpp"

namespace kflow {

namespace {

struct ObservationPoint {
  double r;
  double theta;
};

void validate(const ExhaustionPlan& plan) {
  if (!plan.model) throw ParameterError("exhaustion plan has no model");
  if (plan.ladder.size() < 2) throw ParameterError("exhaustion plan needs at least 2 rungs");
  for (std::size_t k = 0; k < plan.ladder.size(); ++k) {
    if (k > 0 && !(plan.ladder[k] > plan.ladder[k - 1])) {
      throw ParameterError("exhaustion ladder must be strictly increasing");
    }
    if (!quarter_condition(*plan.model, plan.r0, plan.ladder[k])) {
      throw ParameterError("rung R = " + std::to_string(plan.ladder[k]) +
                           " fails zeta(r0) < zeta(R)/4");
    }
  }
  if (!(plan.T0 > 0.0)) throw ParameterError("exhaustion plan needs T0 > 0");
  if (!(plan.tol > 0.0)) throw ParameterError("exhaustion tolerance must be positive");
  if (plan.rings_per_unit < 1) throw ParameterError("rings_per_unit must be >= 1");
  if (plan.snapshot_every < 1) throw ParameterError("snapshot_every must be >= 1");
}

// Observation nodes: the nodes of the first rung's grid inside B_{r0}.
std::vector<ObservationPoint> observation_points(const Grid& grid, double r0) {
  std::vector<ObservationPoint> pts{{0.0, 0.0}};
  for (int i = 1; i <= grid.nr && grid.r[i] <= r0 * (1.0 + 1e-12); ++i) {
    for (int j = 0; j < grid.ntheta; ++j) pts.push_back({grid.r[i], grid.theta[j]});
  }
  return pts;
}

struct RungSamples {
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // [snapshot][observation point]
};

}  // namespace

ConvergenceReport run_exhaustion(const ExhaustionPlan& plan, const AngularData& phi,
                                 const PolarField& u0) {
  validate(plan);
  const ModelGeometry& model = *plan.model;
  const double R1 = plan.ladder.front();
  const double zeta_R1 = model.warp_primitive(R1);

  ConvergenceReport rep;
  rep.r0 = plan.r0;
  rep.T0 = plan.T0;
  rep.tol = plan.tol;

  std::vector<ObservationPoint> points;
  RungSamples previous;
  double osc_min = std::numeric_limits<double>::infinity();
  double osc_max = -std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < plan.ladder.size(); ++k) {
    const double R = plan.ladder[k];
    RungReport rung;
    rung.index = static_cast<int>(k);
    rung.R = R;
    Trajectory traj;
    try {
      const int nr = static_cast<int>(std::lround(R * plan.rings_per_unit));
      const Grid grid = make_grid(model, R, nr, plan.ntheta);
      const BallProblem problem = make_ball_problem(model, R, phi, u0, plan.T0);
      traj = solve_ball(problem, grid, plan.control, plan.snapshot_every);
    } catch (const Error& e) {
      throw RungError(rung.index, R, e.what());
    }
    const Grid& grid = traj.grid;
    rung.nr = grid.nr;
    rung.ntheta = grid.ntheta;
    rung.dt = traj.dt;
    rung.steps = static_cast<int>(std::lround(plan.T0 / traj.dt));
    if (k == 0) points = observation_points(grid, plan.r0);

    // samples on the observation cylinder
    RungSamples samples;
    samples.times = traj.times;
    for (const auto& snap : traj.snapshots) {
      std::vector<double> row;
      row.reserve(points.size());
      for (const auto& p : points) {
        row.push_back(interpolate_polar(grid, snap.u, p.r, p.theta));
        rung.interpolation_budget = std::max(
            rung.interpolation_budget, interpolation_error_estimate(grid, snap.u, p.r, p.theta));
      }
      samples.values.push_back(std::move(row));
    }

    // measured maxima, the rung-level height bound and the curvature estimate
    std::vector<double> radii(grid.r.begin(), grid.r.end());
    const auto v_R = cmc_heights(model, R, radii);
    const double final_radius = mu_of_t(model, R, plan.T0);
    rung.l0 = std::max(1, static_cast<int>(std::ceil(final_radius / R - 1e-12)));
    // u+(o, T0): the constant the uniform height estimate is built from.  The
    // dense-sampling cap sup(H^2/(rho H')) is not used here because H' drops below
    // double resolution near r = 19 in the cosh model.
    rung.height_cap = cmc_height(model, final_radius, 0.0);
    double sup0 = 0.0;
    for (double v : traj.snapshots.front().u) sup0 = std::max(sup0, std::abs(v));

    rung.height_margin = std::numeric_limits<double>::infinity();
    for (const auto& snap : traj.snapshots) {
      const Field grad = gradient_norm(model, grid, snap.u);
      const auto curv = second_fundamental_form(model, grid, snap.u);
      for (int i = 0; i <= grid.nr; ++i) {
        const int count = i == 0 ? 1 : grid.ntheta;
        const bool observed = grid.r[i] <= plan.r0 * (1.0 + 1e-12);
        const bool in_R1 = grid.r[i] <= R1 * (1.0 + 1e-12);
        const double bound = sup0 + rung.height_cap - v_R[i];
        for (int j = 0; j < count; ++j) {
          const auto id = grid.index(i, j);
          const double u = snap.u[id];
          rung.sup_abs_u = std::max(rung.sup_abs_u, std::abs(u));
          rung.height_margin = std::min(rung.height_margin, bound - std::abs(u));
          if (in_R1) rung.sup_W2 = std::max(rung.sup_W2, snap.W[id] * snap.W[id]);
          if (k == 0 && in_R1) {
            osc_min = std::min(osc_min, u);
            osc_max = std::max(osc_max, u);
          }
          if (observed) {
            rung.max_grad = std::max(rung.max_grad, grad[id]);
            if (std::isfinite(curv.A_squared[id])) {
              rung.max_A = std::max(rung.max_A, std::sqrt(std::max(0.0, curv.A_squared[id])));
            }
          }
        }
      }
    }
    traj = Trajectory{};

    try {
      const double gamma = estimate_gamma(model, R1);
      const double delta_psi = gamma / (2.0 * rung.sup_W2);
      double sup_xi_sq = 0.0, sup_xi_slope = 0.0;
      for (double r : radial_sample_ladder(R1, 1024)) {
        sup_xi_sq = std::max(sup_xi_sq, std::pow(model.warp().value(r), 2));
        sup_xi_slope = std::max(sup_xi_slope, std::abs(model.warp().d1(r)));
      }
      sup_xi_slope = std::max(sup_xi_slope, std::abs(model.warp().d1(0.0)));
      const double E_R = curvature_E_R(delta_psi, sup_xi_sq, model.n(), zeta_R1, sup_xi_slope);
      const double L1 = lower_ricci_bounds(model, R1).ambient;
      rep.gamma = gamma;
      rep.L1 = L1;
      rung.curvature_bound = curvature_bound(delta_psi, std::max(0.0, L1), plan.C_sim,
                                             plan.C_sim_tilde, E_R, zeta_R1, plan.T0);
    } catch (const Error& e) {
      rung.curvature_bound = std::numeric_limits<double>::quiet_NaN();
      rep.estimate_note += std::string("curvature bound (rung ") + std::to_string(k) +
                           "): " + e.what() + "; ";
    }

    rung.d_next = std::numeric_limits<double>::quiet_NaN();
    if (k > 0) {
      if (samples.times.size() != previous.times.size()) {
        throw RungError(rung.index, R, "snapshot times differ from the previous rung");
      }
      double d = 0.0;
      for (std::size_t s = 0; s < samples.times.size(); ++s) {
        if (std::abs(samples.times[s] - previous.times[s]) > 1e-12 * plan.T0) {
          throw RungError(rung.index, R, "snapshot times differ from the previous rung");
        }
        for (std::size_t p = 0; p < points.size(); ++p) {
          d = std::max(d, std::abs(samples.values[s][p] - previous.values[s][p]));
        }
      }
      rep.rungs.back().d_next = d;
      rep.d.push_back(d);
    }
    rep.rungs.push_back(rung);
    previous = std::move(samples);

    if (plan.stop_early && !rep.d.empty()) {
      const double budget = rep.rungs[rep.rungs.size() - 2].interpolation_budget +
                            rep.rungs.back().interpolation_budget;
      if (rep.d.back() < plan.tol - budget && k + 1 < plan.ladder.size()) {
        rep.stopped_early = true;
        break;
      }
    }
  }

  rep.decreasing = true;
  for (std::size_t k = 1; k < rep.d.size(); ++k) {
    if (!(rep.d[k] < rep.d[k - 1])) rep.decreasing = false;
  }
  const std::size_t last = rep.rungs.size() - 1;
  const double budget = rep.rungs[last].interpolation_budget + rep.rungs[last - 1].interpolation_budget;
  rep.verdict = !rep.d.empty() && rep.d.back() < plan.tol - budget;

  // Gradient estimate from rung 0 data; u is translated to be nonnegative, so M is its oscillation.
  rep.gradient_M = osc_max - osc_min;
  rep.log_gradient_bound = std::numeric_limits<double>::quiet_NaN();
  try {
    rep.log_gradient_bound =
        interior_gradient_bound(model, R1, rep.gradient_M, plan.beta, plan.k).log_bound;
  } catch (const Error& e) {
    rep.estimate_note += std::string("gradient bound: ") + e.what() + "; ";
  }

  rep.gradient_check = std::isfinite(rep.log_gradient_bound);
  rep.curvature_check = true;
  rep.height_check = true;
  for (const auto& r : rep.rungs) {
    if (rep.gradient_check && r.max_grad > 0.0 && std::log(r.max_grad) > rep.log_gradient_bound) {
      rep.gradient_check = false;
    }
    if (!(r.max_A <= r.curvature_bound)) rep.curvature_check = false;
    if (!(r.height_margin >= -1e-9)) rep.height_check = false;
  }
  return rep;
}

}  // namespace kflow
