#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "killingflow/barriers.hpp"
#include "killingflow/errors.hpp"

// Hyperboloid model of the plane with curvature -kappa^2, rescaled to the unit
// hyperboloid: x = (cosh kr, sinh kr cos th, sinh kr sin th), <x,y> = -x0 y0 + x1 y1 + x2 y2.
// The boundary geodesic is {<x, nu> = 0} with unit spacelike normal
//   nu = (sinh D, cosh D cos th0, cosh D sin th0),
// so that sinh(kappa d) = <x, nu> and the origin sits at d = -D.

namespace kflow {

ScBarrier::ScBarrier(const ModelGeometry& model, HalfplaneGeodesic geodesic, double C,
                     double d0, ScWindow window)
    : model_(&model), geodesic_(geodesic), C_(C), d0_(d0), window_(window) {
  if (model.warp().spec().kind != ProfileKind::hyperbolic || model.n() != 2) {
    throw ParameterError("SC barrier needs the hyperbolic plane as base (n = 2)");
  }
  if (!(C > 0.0)) throw ParameterError("SC barrier height C must be positive");
  if (!(d0 >= 2.0)) throw ParameterError("SC barrier needs d0 >= 2");
  if (!(geodesic.distance > 0.0)) throw ParameterError("half-plane geodesic needs distance > 0");
  if (!(window.along > 0.0) || !(window.depth > 0.0) || window.samples < 2) {
    throw ParameterError("SC sampling window must be non-degenerate");
  }
  kappa_ = model.warp().spec().kappa;

  double inf = std::numeric_limits<double>::infinity();
  const int m = window.samples;
  for (int a = 0; a < m; ++a) {
    const double s = -window.along + 2.0 * window.along * a / (m - 1);
    for (int b = 0; b < m; ++b) {
      const double d = d0 + window.depth * b / (m - 1);
      const auto [r, th] = fermi_point(s, d);
      inf = std::min(inf, model.killing().log_slope(r) * radial_alignment(r, th));
    }
  }
  if (!(inf > 0.0)) {
    throw GeometryError("SC barrier: inf of (rho'/rho)<grad r, grad d> over U0 is " +
                        std::to_string(inf) + " <= 0; no admissible alpha");
  }
  alpha_ = inf;
  C1_ = C * std::exp(alpha_ * d0);
}

double ScBarrier::distance(double r, double theta) const {
  const double rho = kappa_ * r, D = kappa_ * geodesic_.distance;
  const double pairing = -std::cosh(rho) * std::sinh(D) +
                         std::sinh(rho) * std::cosh(D) * std::cos(theta - geodesic_.direction);
  return std::asinh(pairing) / kappa_;
}

double ScBarrier::radial_alignment(double r, double theta) const {
  const double rho = kappa_ * r, D = kappa_ * geodesic_.distance;
  const double kd = kappa_ * distance(r, theta);
  return (std::sinh(D) + std::cosh(rho) * std::sinh(kd)) / (std::sinh(rho) * std::cosh(kd));
}

double ScBarrier::eta_of_distance(double d) const {
  return d >= d0_ ? C1_ * std::exp(-alpha_ * d) : C_;
}

double ScBarrier::eta(double r, double theta) const { return eta_of_distance(distance(r, theta)); }

std::pair<double, double> ScBarrier::fermi_point(double along, double d) const {
  const double D = kappa_ * geodesic_.distance, th0 = geodesic_.direction;
  const double s = kappa_ * along, kd = kappa_ * d;
  const double foot[3] = {std::cosh(D), std::sinh(D) * std::cos(th0), std::sinh(D) * std::sin(th0)};
  const double tangent[3] = {0.0, -std::sin(th0), std::cos(th0)};
  const double normal[3] = {std::sinh(D), std::cosh(D) * std::cos(th0),
                            std::cosh(D) * std::sin(th0)};
  double x[3];
  for (int k = 0; k < 3; ++k) {
    x[k] = std::cosh(kd) * (std::cosh(s) * foot[k] + std::sinh(s) * tangent[k]) +
           std::sinh(kd) * normal[k];
  }
  return {std::acosh(std::max(1.0, x[0])) / kappa_, std::atan2(x[2], x[1])};
}

std::vector<std::pair<double, double>> ScBarrier::window_samples(int count,
                                                                 std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> along(-window_.along, window_.along);
  std::uniform_real_distribution<double> depth(d0_, d0_ + window_.depth);
  std::vector<std::pair<double, double>> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double s = along(rng);
    const double d = depth(rng);
    out.push_back(fermi_point(s, d));
  }
  return out;
}

ScBarrier make_sc_barrier(const ModelGeometry& model, HalfplaneGeodesic geodesic, double C,
                          double d0, ScWindow window) {
  return ScBarrier(model, geodesic, C, d0, window);
}

}  // namespace kflow
