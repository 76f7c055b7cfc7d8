#include <algorithm>
#include <cmath>
#include <limits>

#include "killingflow/barriers.hpp"
#include "killingflow/cmc_radial.hpp"
#include "killingflow/errors.hpp"
#include "killingflow/quadrature.hpp"

namespace kflow {

namespace {

double volume_over_area(const ModelGeometry& model, double r) {
  return model.enclosed_volume(r) / model.area_density(r);
}

double increment(const ModelGeometry& model, double a, double b) {
  auto f = [&model](double r) { return volume_over_area(model, r); };
  return adaptive_simpson(f, a, b, 1e-14).value;
}

}  // namespace

double mu_of_t(const ModelGeometry& model, double r0, double t) {
  if (!(r0 > 0.0)) throw ParameterError("mu_of_t needs r0 > 0");
  if (!(t >= 0.0)) throw ParameterError("mu_of_t needs t >= 0");
  if (t == 0.0) return r0;
  const double limit = std::min(1e6 * r0, model.r_end());

  // bracket [lo, hi] with G(lo) <= t < G(hi), G(R) = int_{r0}^R V/A
  double lo = r0, g_lo = 0.0;
  double width = r0;
  double hi = r0 + width, g_hi = increment(model, lo, hi);
  while (g_hi < t) {
    lo = hi;
    g_lo = g_hi;
    width *= 2.0;
    if (lo >= limit) {
      throw DomainError("mu_of_t: bracket expansion failed beyond R = " + std::to_string(limit));
    }
    hi = std::min(r0 + width, limit);
    g_hi = g_lo + increment(model, lo, hi);
  }

  double x = lo, gx = g_lo;
  const double tol = 1e-12 * std::max(1.0, t);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(gx - t) <= tol) return x;
    double next = x - (gx - t) / volume_over_area(model, x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double g_next = gx + increment(model, x, next);
    if (g_next < t) {
      lo = next;
    } else {
      hi = next;
    }
    x = next;
    gx = g_next;
    if (hi - lo <= 4e-16 * hi) return x;
  }
  return x;
}

double radius_by_ode(const ModelGeometry& model, double r0, double t, int steps) {
  if (!(r0 > 0.0) || !(t >= 0.0) || steps < 1) throw ParameterError("radius_by_ode arguments");
  auto rate = [&model](double R) { return 1.0 / volume_over_area(model, R); };
  const double dt = t / steps;
  double R = r0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = rate(R);
    const double k2 = rate(R + 0.5 * dt * k1);
    const double k3 = rate(R + 0.5 * dt * k2);
    const double k4 = rate(R + dt * k3);
    R += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return R;
}

SupersolutionFlow::SupersolutionFlow(const ModelGeometry& model, double r0)
    : model_(&model), r0_(r0) {
  if (!(r0 > 0.0)) throw ParameterError("supersolution needs r0 > 0");
}

double SupersolutionFlow::height(double r, double t) const {
  if (!(r >= 0.0) || r > r0_) throw DomainError("u+ is defined on [0, r0]");
  return cmc_height(*model_, radius(t), r);
}

std::vector<double> SupersolutionFlow::heights(const std::vector<double>& radii, double t) const {
  for (double r : radii) {
    if (!(r >= 0.0) || r > r0_) throw DomainError("u+ is defined on [0, r0]");
  }
  return cmc_heights(*model_, radius(t), radii);
}

double eval_u_plus(const ModelGeometry& model, double r0, double r, double t) {
  return SupersolutionFlow(model, r0).height(r, t);
}

std::vector<std::vector<double>> parabolic_residual(const std::vector<double>& t_grid,
                                                    const std::vector<double>& r_grid,
                                                    const std::vector<std::vector<double>>& u,
                                                    const RadialOperator& discrete_Q) {
  const std::size_t nt = t_grid.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> res(nt, std::vector<double>(r_grid.size(), nan));
  for (std::size_t j = 1; j + 1 < nt; ++j) {
    const double h0 = t_grid[j] - t_grid[j - 1], h1 = t_grid[j + 1] - t_grid[j];
    const auto q = discrete_Q(r_grid, u[j]);
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
      if (!std::isfinite(q[i])) continue;
      const double dt = (-h1 / (h0 * (h0 + h1))) * u[j - 1][i] +
                        ((h1 - h0) / (h0 * h1)) * u[j][i] + (h0 / (h1 * (h0 + h1))) * u[j + 1][i];
      res[j][i] = dt + q[i];
    }
  }
  return res;
}

namespace {

double field_min(const std::vector<std::vector<double>>& f) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& row : f) {
    for (double v : row) {
      if (std::isfinite(v)) m = std::min(m, v);
    }
  }
  return m;
}

std::vector<double> every_other(const std::vector<double>& g) {
  std::vector<double> out;
  for (std::size_t i = 0; i < g.size(); i += 2) out.push_back(g[i]);
  return out;
}

}  // namespace

SupersolutionCheck verify_supersolution(const ModelGeometry& model, double r0,
                                        const std::vector<double>& t_grid,
                                        const std::vector<double>& r_grid,
                                        const RadialOperator& discrete_Q) {
  if (t_grid.size() < 8 || r_grid.size() < 8) {
    throw ParameterError("verify_supersolution needs at least 8 nodes per grid");
  }
  const SupersolutionFlow flow(model, r0);
  std::vector<std::vector<double>> u(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) u[j] = flow.heights(r_grid, t_grid[j]);

  SupersolutionCheck out;
  out.min_residual = field_min(parabolic_residual(t_grid, r_grid, u, discrete_Q));

  const auto tc = every_other(t_grid);
  const auto rc = every_other(r_grid);
  std::vector<std::vector<double>> uc;
  for (std::size_t j = 0; j < t_grid.size(); j += 2) uc.push_back(every_other(u[j]));
  out.coarse_min_residual = field_min(parabolic_residual(tc, rc, uc, discrete_Q));
  out.tol_num = 10.0 * std::abs(out.coarse_min_residual - out.min_residual) / 3.0;
  out.passed = out.min_residual >= -out.tol_num;
  return out;
}

SupersolutionCheck verify_supersolution(const ModelGeometry& model, double r0, int points,
                                        const RadialOperator& discrete_Q) {
  if (points < 64) throw ParameterError("verify_supersolution grids need >= 64 points");
  std::vector<double> t(points), r(points);
  for (int i = 0; i < points; ++i) {
    t[i] = 0.25 + 0.75 * i / (points - 1);
    r[i] = r0 * i / (points - 1);
  }
  return verify_supersolution(model, r0, t, r, discrete_Q);
}

HeightBounds height_bounds(const ModelGeometry& model, double r0, double T, double sup_u0,
                           std::optional<double> inf_u0) {
  if (!(T > 0.0)) throw ParameterError("height bounds need T > 0");
  if (!(r0 > 0.0)) throw ParameterError("height bounds need r0 > 0");
  HeightBounds b;
  b.sup_u0 = sup_u0;
  b.inf_u0 = inf_u0.value_or(-sup_u0);
  if (b.inf_u0 > b.sup_u0) throw ParameterError("height bounds need inf_u0 <= sup_u0");
  b.final_radius = mu_of_t(model, r0, T);
  b.cap_height = cmc_height(model, b.final_radius, 0.0);
  const ModelGeometry* m = &model;
  const double cap = b.cap_height, sup = b.sup_u0, inf = b.inf_u0;
  b.upper = [m, r0, cap, sup](double r) { return sup + cap - cmc_height(*m, r0, r); };
  b.lower = [m, r0, cap, inf](double r) { return inf - cap + cmc_height(*m, r0, r); };
  return b;
}

double c0_height_cap(const ModelGeometry& model, double r0, int l0, int samples) {
  if (l0 < 1) throw ParameterError("c0_height_cap needs l0 >= 1");
  if (!(r0 > 0.0)) throw ParameterError("c0_height_cap needs r0 > 0");
  const int n = model.n();
  const double end = l0 * r0;
  double sup = -std::numeric_limits<double>::infinity();
  for (double r : radial_sample_ladder(end, samples)) {
    const double a_over_v = model.area_density(r) / model.enclosed_volume(r);
    const double gap = a_over_v - model.area_log_slope(r);  // -nH'/H
    if (!(gap > 0.0)) {
      throw GeometryError("c0_height_cap: H' <= 0 sampled at r = " + std::to_string(r));
    }
    // H^2 / (rho H') = (A/(nV)) / (rho (A/V - A'/A))
    sup = std::max(sup, (a_over_v / n) / (model.killing().value(r) * gap));
  }
  const double inv_H = n * model.enclosed_volume(end) / model.area_density(end);  // -1/H
  return sup * inv_H;
}

}  // namespace kflow
