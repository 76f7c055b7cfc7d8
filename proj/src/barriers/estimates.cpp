#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "killingflow/barriers.hpp"
#include "killingflow/errors.hpp"

namespace kflow {

namespace {

// Pole plus the standard ladder on (0, R].
std::vector<double> ball_samples(double R, int samples) {
  auto out = radial_sample_ladder(R, samples);
  out.insert(out.begin(), 0.0);
  return out;
}

struct KillingRange {
  double min = std::numeric_limits<double>::infinity();
  double max = 0.0;
};

KillingRange killing_range(const ModelGeometry& model, const std::vector<double>& rs) {
  KillingRange k;
  for (double r : rs) {
    const double v = model.killing().value(r);
    k.min = std::min(k.min, v);
    k.max = std::max(k.max, v);
  }
  return k;
}

}  // namespace

double InteriorGradientBound::bound() const {
  if (log_bound > std::log(std::numeric_limits<double>::max())) {
    return std::numeric_limits<double>::infinity();
  }
  return std::exp(log_bound);
}

InteriorGradientBound interior_gradient_bound(const ModelGeometry& model, double R, double M,
                                              double beta, double k, int samples) {
  if (!(R > 0.0)) throw ParameterError("interior gradient bound needs R > 0");
  if (!(M >= 0.0)) throw ParameterError("interior gradient bound needs M >= 0");
  if (!(k > 16.0)) throw ParameterError("interior gradient bound needs k > 16");
  if (!(beta > 0.75 && beta < 1.0)) {
    throw ParameterError("interior gradient bound needs 3/4 < beta < 1");
  }
  const auto rs = ball_samples(R, samples);
  const auto rho = killing_range(model, rs);
  const int n = model.n();

  InteriorGradientBound b;
  b.beta = beta;
  b.k = k;
  // beta > rho^2 e^k / (1 + rho^2 e^k) for every rho on the ball, i.e. at max rho,
  // rewritten in logs: log(beta/(1-beta)) - 2 log rho_max > k
  const double logit = std::log(beta) - std::log1p(-beta);
  if (!(logit - 2.0 * std::log(rho.max) > k)) {
    throw ParameterError("interior gradient bound needs beta > rho^2 e^k/(1 + rho^2 e^k) at max rho");
  }

  const double L = lower_ricci_bounds(model, R, samples).base_drift;
  double drift_sup = 0.0;
  for (double r : rs) {
    if (r < kRadiusFloor) continue;
    const double r1 = model.killing().log_slope(r);
    const double radial = model.killing().curvature_ratio(r) - r1 * r1;
    const double tangential = model.warp().log_slope(r) * r1;
    const double hess = std::sqrt(radial * radial + (n - 1) * tangential * tangential);
    drift_sup = std::max(drift_sup, 2.0 * r1 * r1 + hess);
  }
  b.k_floor = std::max(M * L, drift_sup);
  if (k < b.k_floor) {
    throw ParameterError("interior gradient bound needs k >= max{M L, sup(2|grad log rho|^2 + "
                         "|Hess log rho|)} = " + std::to_string(b.k_floor));
  }

  b.delta = 1.5 * beta - 1.0;
  b.delta_prime = logit - 2.0 * std::log(rho.min);
  b.mu = 2.0 * beta * (b.delta * b.delta_prime - 2.0) / b.delta_prime;
  if (!(b.mu > 0.0)) {
    throw ParameterError("interior gradient bound: mu = " + std::to_string(b.mu) +
                         " <= 0 (delta' = " + std::to_string(b.delta_prime) + ")");
  }

  const double zeta_R = model.warp_primitive(R);
  const double root = std::sqrt(1.0 - beta);
  double C0 = -std::numeric_limits<double>::infinity();
  double xi_ratio = 0.0;
  for (double r : rs) {
    const double xi = model.warp().value(r) / zeta_R;
    const double xi_slope = model.warp().d1(r) / zeta_R;
    const double r1 = r < kRadiusFloor ? 0.0 : model.killing().log_slope(r);
    const double k_val = model.killing().value(r);
    const double brace = 1.25 + n * M * xi_slope + 2.0 * root * xi +
                         (M * (6.0 - 5.0 * beta) * xi + 2.0 * root) * r1;
    C0 = std::max(C0, k_val * k_val / b.mu * brace);
    xi_ratio = std::max(xi_ratio, xi);
  }
  b.C0 = C0;
  const double m = rho.min;
  const double factor = (1.0 + m) * (1.0 + m) / m * M;
  b.log_branch_sup = 128.0 * factor * xi_ratio;
  b.log_branch_C0 = 64.0 * factor * C0;
  b.log_bound = std::max({b.log_branch_sup, b.log_branch_C0, 0.0});
  return b;
}

double curvature_bound(double delta_psi, double L1, double C_sim, double C_sim_tilde,
                       double E_R, double zeta_R, double T) {
  if (!(delta_psi > 0.0)) throw ParameterError("curvature bound needs delta_psi > 0");
  if (!(T > 0.0)) throw ParameterError("curvature bound needs T > 0");
  if (!(zeta_R > 0.0)) throw ParameterError("curvature bound needs zeta(R) > 0");
  if (!(L1 >= 0.0 && C_sim >= 0.0 && C_sim_tilde >= 0.0 && E_R >= 0.0)) {
    throw ParameterError("curvature bound constants must be non-negative");
  }
  const double inside =
      1.0 + L1 + C_sim_tilde + C_sim + E_R / (zeta_R * zeta_R) + 1.0 / (2.0 * T);
  return 4.0 / std::sqrt(delta_psi) * std::sqrt(inside);
}

double curvature_E_R(double delta_psi, double sup_xi_sq, int n, double zeta_R,
                     double sup_xi_slope) {
  if (!(delta_psi > 0.0)) throw ParameterError("E_R needs delta_psi > 0");
  return (1.0 / delta_psi + 4.0) * sup_xi_sq + n * zeta_R * sup_xi_slope;
}

double estimate_gamma(const ModelGeometry& model, double R, int samples) {
  const auto rho = killing_range(model, ball_samples(R, samples));
  return 1.0 / (rho.max * rho.max);
}

EstimateConstants estimate_constants(const ModelGeometry& model, const EstimateInputs& in) {
  if (!(in.sup_W2 > 0.0)) throw ParameterError("sup W^2 must be positive");
  EstimateConstants c;
  c.samples = in.samples;
  const auto grad = interior_gradient_bound(model, in.R, in.M, in.beta, in.k, in.samples);
  c.beta = grad.beta;
  c.delta = grad.delta;
  c.delta_prime = grad.delta_prime;
  c.mu_const = grad.mu;
  c.C0 = grad.C0;
  c.log_gradient_bound = grad.log_bound;

  c.gamma = estimate_gamma(model, in.R, in.samples);
  c.delta_psi = c.gamma / (2.0 * in.sup_W2);
  double sup_xi_sq = 0.0, sup_xi_slope = 0.0;
  for (double r : ball_samples(in.R, in.samples)) {
    sup_xi_sq = std::max(sup_xi_sq, std::pow(model.warp().value(r), 2));
    sup_xi_slope = std::max(sup_xi_slope, std::abs(model.warp().d1(r)));
  }
  const double zeta_R = model.warp_primitive(in.R);
  c.E_R = curvature_E_R(c.delta_psi, sup_xi_sq, model.n(), zeta_R, sup_xi_slope);
  const auto ricci = lower_ricci_bounds(model, in.R, in.samples);
  c.L = ricci.base_drift;
  c.L1 = ricci.ambient;
  c.C_sim = in.C_sim;
  c.C_sim_tilde = in.C_sim_tilde;
  c.curvature_bound =
      curvature_bound(c.delta_psi, c.L1, c.C_sim, c.C_sim_tilde, c.E_R, zeta_R, in.T);
  c.c0_cap = c0_height_cap(model, in.r0, in.l0, in.samples);
  return c;
}

}  // namespace kflow
