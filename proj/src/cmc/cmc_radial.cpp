#include "killingflow/cmc_radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "killingflow/errors.hpp"
#include "killingflow/quadrature.hpp"

namespace kflow {

namespace {

// Quantities of the radial CMC problem that depend only on (model, R).
//   c = -nH(R) = A(R)/V(R) > 0
//   v'(r) = -c V / (rho sqrt(A^2 - c^2 V^2))
// Near r = R the gap A - cV is computed as the integral of (cA - A') over
// [r, R], which avoids cancellation between two nearly equal numbers.
struct RadialCmc {
  const ModelGeometry& model;
  double R;
  double c;
  double volume_R;
  double area_R;
  double near_band;  // below R - near_band the gap is computed directly
  double noise;      // relative roundoff level of the gap near r = R

  RadialCmc(const ModelGeometry& m, double radius) : model(m), R(radius) {
    if (!(R > 0.0)) throw ParameterError("CMC radius must be positive");
    if (R > model.r_end()) throw DomainError("CMC radius beyond the model's profile tables");
    c = -model.n() * model.sphere_mean_curvature(R);
    volume_R = model.enclosed_volume(R);
    area_R = model.area_density(R);
    near_band = 0.05 * R;
    // The gap is a difference of numbers of size c A(R) whose leading-order
    // remainder is cA(R) - A'(R); in exponentially growing models this loses
    // about 2R/ln(10) digits.
    const double slope_gap = c * area_R - model.area_density_slope(R);
    noise = 4.0 * std::numeric_limits<double>::epsilon() * c * area_R / std::abs(slope_gap);
  }

  // Height integral of the substituted integrand over [a, b].  When the gap noise
  // is far below tolerance this is adaptive Simpson; otherwise adaptive refinement
  // would chase roundoff, so composite Gauss-Legendre panels are doubled until two
  // levels agree to the tolerance or to the noise level.
  double height_integral(double a, double b, double tol) const {
    auto g = [this](double tau) { return height_integrand(tau); };
    if (noise < 1e-11) return adaptive_simpson(g, a, b, tol).value;
    double coarse = gauss_legendre8(g, a, b, (b - a) / 2.0);
    for (int panels = 4; panels <= 4096; panels *= 2) {
      const double fine = gauss_legendre8(g, a, b, (b - a) / panels);
      if (std::abs(fine - coarse) <= std::max(tol, 16.0 * noise * std::abs(fine))) return fine;
      coarse = fine;
    }
    throw QuadratureError("CMC height integral stalled at the roundoff level " +
                          std::to_string(noise) + " for R = " + std::to_string(R));
  }

  // `offset` = R - r, passed separately because R - (R - offset) loses the
  // low bits of small offsets.
  double gap(double r, double offset, double volume_r) const {
    if (offset >= near_band) return model.area_density(r) - c * volume_r;
    auto integrand = [this, offset](double x) {
      const double s = R - offset * x;
      return c * model.area_density(s) - model.area_density_slope(s);
    };
    return offset * gauss_legendre8(integrand, 0.0, 1.0, 1.0 / (16.0 * offset));
  }

  double slope(double r) const { return slope_at_offset(R - r, r); }

  double slope_at_offset(double offset, double r) const {
    if (r <= 0.0) return 0.0;
    const double volume_r = model.enclosed_volume(r);
    const double e = gap(r, offset, volume_r);
    const double sum = model.area_density(r) + c * volume_r;
    if (!(e > 0.0)) {
      throw GeometryError("CMC slope denominator vanished at r = " + std::to_string(r) +
                          " (A - |nH(R)|V <= 0)");
    }
    return -c * volume_r / (model.killing().value(r) * std::sqrt(e * sum));
  }

  // Height integrand after s = R - tau^2: 2 tau |v'(R - tau^2)|, bounded at tau = 0.
  double height_integrand(double tau) const {
    const double t2 = tau * tau;
    if (t2 <= 1e-14 * R) {
      // limit: e ~ (cA(R) - A'(R)) tau^2, sum -> 2 A(R)
      const double slope_gap = c * area_R - model.area_density_slope(R);
      return 2.0 * c * volume_R /
             (model.killing().value(R) * std::sqrt(slope_gap * 2.0 * area_R));
    }
    return -2.0 * tau * slope_at_offset(t2, std::max(0.0, R - t2));
  }
};

}  // namespace

std::vector<double> clustered_grid(double R, int intervals) {
  if (!(R > 0.0)) throw ParameterError("grid radius must be positive");
  if (intervals < 16) throw ParameterError("grid_size must be >= 16");
  const int cluster = std::max(2, intervals / 8);
  const int uniform = intervals - cluster;
  const double h = 0.95 * R / uniform;
  const double band = R - uniform * h;

  // geometric steps h q, h q^2, ..., h q^cluster summing to the 5% band
  auto band_sum = [&](double q) {
    double s = 0.0, p = 1.0;
    for (int k = 1; k <= cluster; ++k) {
      p *= q;
      s += h * p;
    }
    return s;
  };
  double lo = 0.0, hi = 1.0;
  if (band_sum(hi) < band) hi = 2.0;  // only when the band holds more than `cluster` steps
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (band_sum(mid) < band ? lo : hi) = mid;
  }
  const double q = 0.5 * (lo + hi);

  std::vector<double> grid(intervals + 1);
  for (int i = 0; i <= uniform; ++i) grid[i] = i * h;
  double step = h;
  for (int k = 1; k <= cluster; ++k) {
    step *= q;
    grid[uniform + k] = grid[uniform + k - 1] + step;
  }
  grid[intervals] = R;
  for (int i = uniform + 1; i < intervals; ++i) grid[i] = std::min(grid[i], R);
  return grid;
}

double cmc_slope(const ModelGeometry& model, double R, double r) {
  if (!(r >= 0.0)) throw DomainError("CMC slope needs r >= 0");
  if (!(r < R)) throw DomainError("CMC slope is singular at r = R");
  return RadialCmc(model, R).slope(r);
}

double cmc_height(const ModelGeometry& model, double R, double r) {
  if (!(r >= 0.0) || r > R) throw DomainError("CMC height needs 0 <= r <= R");
  if (r == R) return 0.0;
  const RadialCmc cmc(model, R);
  return cmc.height_integral(0.0, std::sqrt(R - r), model.quad_tol());
}

std::vector<double> cmc_heights(const ModelGeometry& model, double R,
                                const std::vector<double>& radii) {
  const RadialCmc cmc(model, R);
  const std::size_t m = radii.size();
  std::vector<double> out(m, 0.0);
  if (m == 0) return out;
  for (std::size_t j = 0; j < m; ++j) {
    if (!(radii[j] >= 0.0) || radii[j] > R || (j > 0 && radii[j] < radii[j - 1])) {
      throw DomainError("cmc_heights needs increasing radii in [0, R]");
    }
  }
  const double panel_tol = model.quad_tol() / static_cast<double>(m);
  double above = R;
  double acc = 0.0;
  for (std::size_t j = m; j-- > 0;) {
    acc += cmc.height_integral(std::sqrt(R - above), std::sqrt(R - radii[j]), panel_tol);
    out[j] = acc;
    above = radii[j];
  }
  return out;
}

CmcProfile solve_cmc_graph(const ModelGeometry& model, double R, int grid_size) {
  const RadialCmc cmc(model, R);
  CmcProfile out;
  out.R = R;
  out.mean_curvature = model.sphere_mean_curvature(R);
  out.r = clustered_grid(R, grid_size);
  const int N = grid_size;
  out.v.assign(N + 1, 0.0);
  out.vp.assign(N + 1, 0.0);

  const double panel_tol = model.quad_tol() / N;
  for (int i = N - 1; i >= 0; --i) {
    const double t_lo = std::sqrt(R - out.r[i + 1]);
    const double t_hi = std::sqrt(R - out.r[i]);
    out.v[i] = out.v[i + 1] + cmc.height_integral(t_lo, t_hi, panel_tol);
  }
  for (int i = 1; i < N; ++i) out.vp[i] = cmc.slope(out.r[i]);
  out.vp[N] = -std::numeric_limits<double>::infinity();

  for (int i = 0; i < N; ++i) {
    if (!(out.v[i] > out.v[i + 1]) || out.vp[i] > 0.0) {
      throw GeometryError("CMC profile lost monotonicity at r = " + std::to_string(out.r[i]));
    }
  }
  return out;
}

ProfileCurve integrate_profile_curve(const ModelGeometry& model, double R, double step,
                                     double arclength_budget) {
  if (!(R > 0.0)) throw ParameterError("profile curve needs R > 0");
  if (!(step > 0.0)) throw ParameterError("profile curve needs step > 0");
  const double nH = model.n() * model.sphere_mean_curvature(R);
  if (!(arclength_budget > 0.0)) {
    arclength_budget = 2.0 * (R + model.killing().value(R) * cmc_height(model, R, 0.0));
  }
  const double stop_radius = std::max(kRadiusFloor, 2.0 * step);

  struct State {
    double r, s, phi;
  };
  auto rhs = [&](const State& y) {
    const double r = std::max(y.r, kRadiusFloor);
    return State{std::cos(y.phi), std::sin(y.phi) / model.killing().value(r),
                 -nH - model.n() * model.cylinder_mean_curvature(r) * std::sin(y.phi)};
  };
  auto axpy = [](const State& y, double a, const State& k) {
    return State{y.r + a * k.r, y.s + a * k.s, y.phi + a * k.phi};
  };

  ProfileCurve curve;
  State y{R, 0.0, std::numbers::pi / 2};
  double arc = 0.0;
  auto record = [&] {
    curve.arclength.push_back(arc);
    curve.r.push_back(y.r);
    curve.s.push_back(y.s);
    curve.angle.push_back(y.phi);
  };
  record();
  while (y.r >= stop_radius && arc + step <= arclength_budget) {
    const State k1 = rhs(y);
    const State k2 = rhs(axpy(y, 0.5 * step, k1));
    const State k3 = rhs(axpy(y, 0.5 * step, k2));
    const State k4 = rhs(axpy(y, step, k3));
    y.r += step / 6.0 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r);
    y.s += step / 6.0 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s);
    y.phi += step / 6.0 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
    arc += step;
    if (!(y.phi >= 0.0 && y.phi <= std::numbers::pi)) {
      throw StepSizeError("profile angle left [0, pi] at arclength " + std::to_string(arc) +
                          "; reduce the step");
    }
    record();
  }
  return curve;
}

double cmc_residual(const ModelGeometry& model, const CmcProfile& profile) {
  const auto& r = profile.r;
  const std::size_t N = r.size() - 1;
  if (r.size() < 6 || profile.v.size() != r.size() || profile.vp.size() != r.size()) {
    throw ParameterError("malformed CMC profile");
  }
  std::vector<double> flux(N + 1);
  for (std::size_t i = 0; i <= N; ++i) {
    const double vp = profile.vp[i];
    if (std::isinf(vp)) {
      flux[i] = vp < 0 ? -1.0 : 1.0;
    } else {
      const double rho = model.killing().value(r[i]);
      flux[i] = vp / std::sqrt(1.0 / (rho * rho) + vp * vp);
    }
  }
  const double target = model.n() * profile.mean_curvature;
  double worst = 0.0;
  for (std::size_t i = 1; i + 2 < N; ++i) {
    const double h0 = r[i] - r[i - 1], h1 = r[i + 1] - r[i];
    const double dflux = (-h1 / (h0 * (h0 + h1))) * flux[i - 1] +
                         ((h1 - h0) / (h0 * h1)) * flux[i] +
                         (h0 / (h1 * (h0 + h1))) * flux[i + 1];
    const double lhs = dflux + flux[i] * model.area_log_slope(r[i]);
    worst = std::max(worst, std::abs(lhs - target));
  }
  return worst;
}

}  // namespace kflow
