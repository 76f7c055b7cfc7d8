#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "killingflow/errors.hpp"

namespace kflow {

struct QuadResult {
  double value = 0.0;
  int evaluations = 0;
};

namespace detail {

// Relative accuracy demanded on top of the absolute tolerance.  Without it the
// tiny enclosed volumes near the pole would be resolved only to quad_tol, which
// ruins quotients such as A/V.
inline constexpr double kQuadRelFloor = 1e-12;
inline constexpr double kQuadRoundoff = 1e-15;

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth, int level, int& evals) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  evals += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double both = left + right;
  const double delta = both - whole;
  if (!std::isfinite(both)) {
    throw QuadratureError("non-finite integrand on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
  }
  double eps = std::min(tol, kQuadRelFloor * std::abs(both));
  eps = std::max({eps, kQuadRoundoff * std::abs(both), 1e-300});
  if (level >= 1 && std::abs(delta) <= 15.0 * eps) return both + delta / 15.0;
  if (depth <= 0) {
    throw QuadratureError("adaptive Simpson did not reach tolerance on [" + std::to_string(a) +
                          ", " + std::to_string(b) + "]");
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, level + 1, evals) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, level + 1, evals);
}

}  // namespace detail

// Adaptive Simpson with interval bisection and Richardson correction.
template <class F>
QuadResult adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 50) {
  QuadResult out;
  if (a == b) return out;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  out.evaluations = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  out.value = detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth, 0,
                                     out.evaluations);
  return out;
}

// Composite 8-point Gauss-Legendre with panels no longer than `max_panel`.
// Deterministic and smooth in the endpoints, so it can sit inside an adaptive
// outer integral without injecting noise.
template <class F>
double gauss_legendre8(F&& f, double a, double b, double max_panel) {
  static constexpr double node[4] = {0.18343464249564978, 0.525532409916329,
                                     0.7966664774136267, 0.9602898564975362};
  static constexpr double weight[4] = {0.36268378337836177, 0.31370664587788705,
                                       0.22238103445337434, 0.10122853629037669};
  if (a == b) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / max_panel)));
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double part = 0.0;
    for (int k = 0; k < 4; ++k) {
      part += weight[k] * (f(mid - 0.5 * h * node[k]) + f(mid + 0.5 * h * node[k]));
    }
    sum += part;
  }
  return 0.5 * h * sum;
}

}  // namespace kflow
