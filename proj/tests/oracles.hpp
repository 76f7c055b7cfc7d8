#pragma once

// Independent numerical oracles shared by the unit and acceptance tests.
// Nothing here calls into the library.

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_m.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int m) {
  std::vector<double> x(m), w(m);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

// Composite Gauss-Legendre with `panels` equal panels of `m` points.
template <class F>
double gl_integrate(F&& f, double a, double b, int panels = 64, int m = 20) {
  static thread_local std::pair<std::vector<double>, std::vector<double>> rule;
  if (static_cast<int>(rule.first.size()) != m) rule = gauss_legendre(m);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < m; ++i) sum += rule.second[i] * f(mid + 0.5 * h * rule.first[i]);
  }
  return 0.5 * h * sum;
}

// Radial CMC graph in the hyperbolic plane with Killing length cosh r (n = 2).
// With A = sinh r cosh r and V = sinh^2 r / 2 the slope reduces to
//   v'(r) = -cosh R tanh r / sqrt(sinh(R - r) sinh(R + r)).
inline double hyperbolic_cmc_slope(double R, double r) {
  return -std::cosh(R) * std::tanh(r) / std::sqrt(std::sinh(R - r) * std::sinh(R + r));
}

inline double hyperbolic_cmc_height(double R, double r) {
  // s = R - t^2; sinh(t^2)/t^2 evaluated stably through expm1-free series at 0
  auto g = [R](double t) {
    const double t2 = t * t;
    const double s = R - t2;
    const double shrink = t2 < 1e-8 ? 1.0 + t2 * t2 / 6.0 : std::sinh(t2) / t2;
    return 2.0 * std::cosh(R) * std::tanh(s) / std::sqrt(shrink * std::sinh(R + s));
  };
  return gl_integrate(g, 0.0, std::sqrt(R - r));
}

}  // namespace oracle
