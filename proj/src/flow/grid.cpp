#include <cmath>
#include <numbers>
#include <string>

#include "killingflow/errors.hpp"
#include "killingflow/flow.hpp"
#include "killingflow/quadrature.hpp"
#include "internal.hpp"

namespace kflow {

namespace detail {

// Radial Laplacian at the pole: for radial u, Delta u(0) = (u(h) - u(0)) / m(h)
// up to O(h^2), with m solving Delta m = 1, m(0) = 0.
double pole_mass(const ModelGeometry& model, double h) {
  const int n = model.n();
  auto power = [&](double s) { return std::pow(model.warp().value(s), n - 1); };
  auto integrand = [&](double s) { return gauss_legendre8(power, 0.0, s, h) / power(s); };
  return gauss_legendre8(integrand, 0.0, h, h);
}

}  // namespace detail

Grid make_grid(const ModelGeometry& model, double R, int nr, int ntheta) {
  if (!(R > 0.0)) throw ParameterError("grid needs R > 0");
  if (nr < 8) throw ParameterError("grid needs at least 8 rings");
  if (ntheta != 1 && ntheta < 8) throw ParameterError("grid needs ntheta = 1 or ntheta >= 8");
  if (ntheta > 1 && model.n() != 2) {
    throw ParameterError("angular grids are two-dimensional; use ntheta = 1 for n = " +
                         std::to_string(model.n()));
  }
  if (R > model.r_end()) throw DomainError("grid radius exceeds the profile range");

  Grid g;
  g.nr = nr;
  g.ntheta = ntheta;
  g.R = R;
  g.h = R / nr;
  g.dtheta = 2.0 * std::numbers::pi / ntheta;
  g.r.resize(nr + 1);
  for (int i = 0; i <= nr; ++i) g.r[i] = i == nr ? R : i * g.h;
  g.theta.resize(ntheta);
  for (int j = 0; j < ntheta; ++j) g.theta[j] = j * g.dtheta;

  g.pole_mass = detail::pole_mass(model, g.h);
  return g;
}

BallProblem make_ball_problem(const ModelGeometry& model, double R,
                              std::function<double(double)> phi,
                              std::function<double(double, double)> u0, double T) {
  if (!(R > 0.0)) throw ParameterError("ball problem needs R > 0");
  if (!phi || !u0) throw ParameterError("ball problem needs boundary and initial data");
  for (int j = 0; j < 256; ++j) {
    const double th = 2.0 * std::numbers::pi * j / 256;
    const double a = phi(th), b = u0(R, th);
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw ParameterError("ball problem data is not finite at theta = " + std::to_string(th));
    }
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
      throw ParameterError("initial data does not match boundary data at theta = " +
                           std::to_string(th));
    }
  }
  BallProblem p;
  p.model = &model;
  p.R = R;
  p.T = T > 0.0 ? T : 0.5 * model.warp_primitive(R);
  p.phi = std::move(phi);
  p.u0 = std::move(u0);
  return p;
}

BallProblem make_radial_problem(const ModelGeometry& model, double R, double boundary_value,
                                std::function<double(double)> u0, double T) {
  if (!u0) throw ParameterError("radial problem needs initial data");
  auto p = make_ball_problem(
      model, R, [boundary_value](double) { return boundary_value; },
      [u0](double r, double) { return u0(r); }, T);
  p.radial_data = true;
  return p;
}

std::string to_string(Scheme s) {
  return s == Scheme::explicit_euler ? "explicit" : "semi_implicit";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "explicit") return Scheme::explicit_euler;
  if (name == "semi_implicit") return Scheme::semi_implicit;
  throw ParameterError("unknown scheme '" + name + "' (expected explicit or semi_implicit)");
}

}  // namespace kflow
