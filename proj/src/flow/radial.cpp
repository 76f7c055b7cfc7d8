#include <cmath>
#include <limits>
#include <string>

#include "internal.hpp"
#include "killingflow/errors.hpp"
#include "killingflow/flow.hpp"

namespace kflow {

std::vector<double> radial_Q(const ModelGeometry& model, const std::vector<double>& r,
                             const std::vector<double>& u) {
  if (r.size() != u.size() || r.size() < 3) {
    throw ParameterError("radial_Q needs matching grids with at least 3 nodes");
  }
  const int n = model.n();
  const std::size_t m = r.size();
  std::vector<double> q(m, std::numeric_limits<double>::quiet_NaN());
  if (r[0] == 0.0) {
    q[0] = (u[1] - u[0]) / detail::pole_mass(model, r[1]);
  }
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double h0 = r[i] - r[i - 1], h1 = r[i + 1] - r[i];
    const double ur = (-h1 / (h0 * (h0 + h1))) * u[i - 1] + ((h1 - h0) / (h0 * h1)) * u[i] +
                      (h0 / (h1 * (h0 + h1))) * u[i + 1];
    const double urr = 2.0 * (h1 * u[i - 1] - (h0 + h1) * u[i] + h0 * u[i + 1]) /
                       (h0 * h1 * (h0 + h1));
    const double rho = model.killing().value(r[i]);
    const double W2 = 1.0 / (rho * rho) + ur * ur;
    const double drift = (1.0 + 1.0 / (rho * rho * W2)) * model.killing().log_slope(r[i]);
    q[i] = (1.0 - ur * ur / W2) * urr + ((n - 1) * model.warp().log_slope(r[i]) + drift) * ur;
  }
  return q;
}

RadialOperator radial_operator(const ModelGeometry& model) {
  const ModelGeometry* m = &model;
  return [m](const std::vector<double>& r, const std::vector<double>& u) {
    return radial_Q(*m, r, u);
  };
}

Trajectory radial_solve(const BallProblem& problem, int nr, const StepControl& control,
                        int snapshot_every) {
  if (!problem.model) throw ParameterError("radial_solve needs a model");
  if (!problem.radial_data) {
    throw ParameterError("radial_solve needs radial data (use make_radial_problem)");
  }
  const Grid grid = make_grid(*problem.model, problem.R, nr, 1);
  return solve_ball(problem, grid, control, snapshot_every);
}

}  // namespace kflow
