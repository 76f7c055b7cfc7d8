#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "internal.hpp"
#include "killingflow/errors.hpp"
#include "killingflow/flow.hpp"

namespace kflow {

namespace {

double sup_abs(const Field& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

void check_finite(const Field& u, double t) {
  for (double v : u) {
    if (!std::isfinite(v)) {
      throw DivergenceError("non-finite height at t = " + std::to_string(t));
    }
  }
}

void impose_boundary(const BallProblem& problem, const Grid& grid, Field& u) {
  for (int j = 0; j < grid.ntheta; ++j) u[grid.index(grid.nr, j)] = problem.phi(grid.theta[j]);
}

// Rows of the frozen-coefficient operator, built ring by ring in parallel and
// stored per node so the assembly order never depends on the thread count.
std::vector<detail::Row> frozen_rows(const ModelGeometry& model, const Grid& grid,
                                     const Field& u) {
  const auto geo = detail::ring_geometry(model, grid);
  std::vector<detail::Row> rows(grid.size());
  detail::operator_row(model, grid, geo, u, 0, 0, rows[0]);
#pragma omp parallel for schedule(static)
  for (int ring = 1; ring < grid.nr; ++ring) {
    for (int j = 0; j < grid.ntheta; ++j) {
      detail::operator_row(model, grid, geo, u, ring, j, rows[grid.index(ring, j)]);
    }
  }
  return rows;
}

Field semi_implicit_step(const FlowState& state, const BallProblem& problem, const Grid& grid,
                         const StepControl& control, double dt) {
  const auto rows = frozen_rows(*problem.model, grid, state.u);
  const auto N = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(grid.size() * 9);
  Eigen::VectorXd rhs(N);
  for (int ring = 0; ring <= grid.nr; ++ring) {
    const int count = ring == 0 ? 1 : grid.ntheta;
    for (int j = 0; j < count; ++j) {
      const auto self = grid.index(ring, j);
      const auto row_id = static_cast<Eigen::Index>(self);
      if (ring == grid.nr) {
        triplets.emplace_back(row_id, row_id, 1.0);
        rhs(row_id) = problem.phi(grid.theta[j]);
        continue;
      }
      const auto& row = rows[self];
      triplets.emplace_back(row_id, row_id, 1.0 - dt * row.diagonal);
      for (std::size_t e = 0; e < row.index.size(); ++e) {
        triplets.emplace_back(row_id, static_cast<Eigen::Index>(row.index[e]),
                              -dt * row.weight[e]);
      }
      rhs(row_id) = state.u[self];
    }
  }
  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> solver;
  solver.compute(A);
  if (solver.info() != Eigen::Success) {
    throw LinearSolveError("sparse LU factorization failed at t = " + std::to_string(state.t));
  }
  const Eigen::VectorXd x = solver.solve(rhs);
  if (solver.info() != Eigen::Success) {
    throw LinearSolveError("sparse LU solve failed at t = " + std::to_string(state.t));
  }
  const double residual = (A * x - rhs).lpNorm<Eigen::Infinity>();
  const double scale = 1.0 + rhs.lpNorm<Eigen::Infinity>();
  if (!(residual <= control.tol_lin * scale)) {
    throw LinearSolveError("linear residual " + std::to_string(residual) + " exceeds tol_lin at t = " +
                           std::to_string(state.t));
  }
  return Field(x.data(), x.data() + N);
}

}  // namespace

FlowState initial_state(const BallProblem& problem, const Grid& grid) {
  if (!problem.model) throw ParameterError("ball problem has no model");
  if (std::abs(grid.R - problem.R) > 1e-14 * problem.R) {
    throw ParameterError("grid radius does not match the problem radius");
  }
  FlowState s;
  s.u.assign(grid.size(), 0.0);
  s.u[0] = problem.u0(0.0, 0.0);
  for (int ring = 1; ring < grid.nr; ++ring) {
    for (int j = 0; j < grid.ntheta; ++j) {
      s.u[grid.index(ring, j)] = problem.u0(grid.r[ring], grid.theta[j]);
    }
  }
  impose_boundary(problem, grid, s.u);
  check_finite(s.u, 0.0);
  s.W = compute_W(*problem.model, grid, s.u);
  return s;
}

FlowState step(const FlowState& state, const BallProblem& problem, const Grid& grid,
               const StepControl& control, double dt) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  const ModelGeometry& model = *problem.model;
  FlowState next;
  next.t = state.t + dt;
  next.step_count = state.step_count + 1;
  if (control.scheme == Scheme::explicit_euler) {
    const double limit = explicit_dt_limit(model, grid, state.u, control.cfl);
    if (dt > limit * (1.0 + 1e-12)) {
      throw CflViolation("explicit step dt = " + std::to_string(dt) + " exceeds the limit " +
                         std::to_string(limit) + " at t = " + std::to_string(state.t));
    }
    const Field q = discretize_Q(model, grid, state.u);
    next.u = state.u;
    for (std::size_t i = 0; i < next.u.size(); ++i) next.u[i] += dt * q[i];
    impose_boundary(problem, grid, next.u);
  } else {
    next.u = semi_implicit_step(state, problem, grid, control, dt);
  }
  check_finite(next.u, next.t);
  next.W = compute_W(model, grid, next.u);
  return next;
}

namespace {

double max_curvature_norm(const ModelGeometry& model, const Grid& grid, const Field& u) {
  const auto curv = second_fundamental_form(model, grid, u);
  double m = 0.0;
  for (double a2 : curv.A_squared) {
    if (std::isfinite(a2)) m = std::max(m, std::sqrt(std::max(0.0, a2)));
  }
  return m;
}

void record(Trajectory& traj, const ModelGeometry& model, const FlowState& s) {
  traj.snapshots.push_back(s);
  traj.times.push_back(s.t);
  const Field g = gradient_norm(model, traj.grid, s.u);
  traj.max_gradient.push_back(*std::max_element(g.begin(), g.end()));
  traj.max_curvature.push_back(max_curvature_norm(model, traj.grid, s.u));
}

}  // namespace

Trajectory solve_ball(const BallProblem& problem, const Grid& grid, const StepControl& control,
                      int snapshot_every) {
  if (!problem.model) throw ParameterError("ball problem has no model");
  if (!(control.dt_max > 0.0)) throw ParameterError("dt_max must be positive");
  if (!(control.tol_lin > 0.0)) throw ParameterError("tol_lin must be positive");
  if (!(problem.T > 0.0)) throw ParameterError("final time must be positive");
  const ModelGeometry& model = *problem.model;

  Trajectory traj;
  traj.grid = grid;
  traj.control = control;
  traj.T = problem.T;
  const long steps = static_cast<long>(std::ceil(problem.T / control.dt_max - 1e-12));
  traj.dt = problem.T / steps;
  const long every = snapshot_every > 0 ? snapshot_every : std::max(1L, steps / 16);

  FlowState state = initial_state(problem, grid);
  // Divergence guard: ten times the barrier height bound; disabled when the
  // bound itself cannot be evaluated (for instance when R(T) overflows the model).
  const double sup0 = sup_abs(state.u);
  traj.divergence_guard = std::numeric_limits<double>::infinity();
  try {
    const auto bounds = height_bounds(model, problem.R, problem.T, sup0);
    traj.divergence_guard = 10.0 * (sup0 + bounds.cap_height);
  } catch (const Error&) {
  }

  record(traj, model, state);
  for (long k = 1; k <= steps; ++k) {
    state = step(state, problem, grid, control, traj.dt);
    if (k == steps) state.t = problem.T;
    if (sup_abs(state.u) > traj.divergence_guard) {
      throw DivergenceError("sup |u| = " + std::to_string(sup_abs(state.u)) +
                            " exceeds the guard " + std::to_string(traj.divergence_guard) +
                            " at t = " + std::to_string(state.t));
    }
    if (k % every == 0 || k == steps) record(traj, model, state);
  }
  return traj;
}

}  // namespace kflow
