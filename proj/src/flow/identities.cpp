#include <algorithm>
#include <cmath>
#include <limits>

#include "internal.hpp"
#include "killingflow/errors.hpp"
#include "killingflow/flow.hpp"

// Residuals of the pointwise evolution identities along a radial trajectory.
//
// The identities are stated for the normal parametrization, while the solver
// moves points vertically over a fixed base point.  The two time derivatives of
// a function f on the evolving graph differ by a tangential transport term:
//   d_t^normal f = d_t f |_x - W nH <grad f, X^T>,
// and for a radial f, <grad f, X^T> = f_r rho^2 u_r / g_rr with g_rr = 1 + rho^2 u_r^2.

namespace kflow {

IdentityReport residual_identities(const ModelGeometry& model, const Trajectory& trajectory) {
  const Grid& grid = trajectory.grid;
  if (!grid.radial()) throw ParameterError("residual_identities needs a radial trajectory");
  const auto& snaps = trajectory.snapshots;
  if (snaps.size() < 3) throw ParameterError("residual_identities needs at least 3 snapshots");
  if (grid.nr < 6) throw ParameterError("residual_identities needs at least 6 rings");

  const int n = model.n();
  const double h = grid.h;
  const auto geo = detail::ring_geometry(model, grid);
  const AmbientFrame frame(model);

  IdentityReport rep;
  rep.par_zeta_min_slack = std::numeric_limits<double>::infinity();
  rep.snapshots_used = static_cast<int>(snaps.size()) - 2;
  rep.nodes_per_snapshot = grid.nr - 3;

  for (std::size_t j = 1; j + 1 < snaps.size(); ++j) {
    const auto& prev = snaps[j - 1];
    const auto& cur = snaps[j];
    const auto& next = snaps[j + 1];
    const double h0 = cur.t - prev.t, h1 = next.t - cur.t;
    // nonuniform centered first derivative, applied to differences from the middle value
    const double wm = -h1 / (h0 * (h0 + h1)), wp = h0 / (h1 * (h0 + h1));
    const auto& u = cur.u;
    const auto& Wf = cur.W;

    for (int i = 2; i <= grid.nr - 2; ++i) {
      const double r = grid.r[i];
      const double ur = (u[i + 1] - u[i - 1]) / (2.0 * h);
      const double urr = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
      const double W = Wf[i];
      const double Wr = (Wf[i + 1] - Wf[i - 1]) / (2.0 * h);
      const double Wrr = (Wf[i + 1] - 2.0 * W + Wf[i - 1]) / (h * h);

      const double rho = geo.rho[i], lr = geo.rho_log_slope[i], rho1 = rho * lr;
      const double xi = geo.xi[i], xi1 = geo.xi_slope[i];
      const double g = 1.0 + rho * rho * ur * ur;
      const double g_r = 2.0 * rho * rho1 * ur * ur + 2.0 * rho * rho * ur * urr;
      auto laplacian = [&](double f_r, double f_rr) {
        return f_rr / g + f_r * ((n - 1) * xi1 / (xi * g) - g_r / (2.0 * g * g));
      };

      const double k_radial =
          (urr + 2.0 * lr * ur + rho * rho1 * ur * ur * ur) / (rho * rho * W * W * W);
      const double k_sphere = ur * xi1 / (xi * W);
      const double nH = k_radial + (n - 1) * k_sphere;
      const double A2 = k_radial * k_radial + (n - 1) * k_sphere * k_sphere;
      const auto ric = frame.ricci(r);
      const double ric_NN = ric.fiber / (rho * rho * W * W) + ric.radial * ur * ur / (W * W);
      const double transport = W * nH * rho * rho * ur / g;  // times f_r gives the correction

      const double dW = wm * (prev.W[i] - W) + wp * (next.W[i] - W) - transport * Wr;
      const double evolW =
          dW - laplacian(Wr, Wrr) + W * (A2 + ric_NN) + 2.0 * Wr * Wr / (g * W);

      const double ds = wm * (prev.u[i] - u[i]) + wp * (next.u[i] - u[i]) - transport * ur;
      const double par_s = ds - laplacian(ur, urr) - 2.0 * rho1 * ur / (rho * rho * rho * W * W);

      const double dzeta = -transport * xi;
      const double grad_s2 = ur * ur / g;
      const double slack = dzeta - laplacian(xi, xi1) + n * xi1 +
                           rho * rho * grad_s2 * xi * (lr / g - xi1 / xi);

      rep.evolW_max = std::max(rep.evolW_max, std::abs(evolW));
      rep.par_s_max = std::max(rep.par_s_max, std::abs(par_s));
      rep.par_zeta_min_slack = std::min(rep.par_zeta_min_slack, slack);
    }
  }
  return rep;
}

}  // namespace kflow
