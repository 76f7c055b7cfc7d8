#include <cmath>
#include <numbers>

#include "killingflow/errors.hpp"
#include "killingflow/exhaustion.hpp"

namespace kflow {

namespace {

constexpr double kNodeSnap = 1e-10;

// Lagrange weights of the nodes base, base+1, base+2, base+3 at position x (in node units).
void lagrange4(double x, int base, double w[4]) {
  for (int a = 0; a < 4; ++a) {
    double num = 1.0, den = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      num *= x - (base + b);
      den *= static_cast<double>(a - b);
    }
    w[a] = num / den;
  }
}

double wrap_angle(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  return t;
}

// Value on ring `ring` (>= 0) at angle theta, interpolated along the ring.
double ring_value(const Grid& grid, const Field& u, int ring, double theta, int angular_shift) {
  if (ring == 0) return u[0];
  const int nt = grid.ntheta;
  if (nt == 1) return u[grid.index(ring, 0)];
  const double y = wrap_angle(theta) / grid.dtheta;
  const double nearest = std::round(y);
  if (std::abs(y - nearest) <= kNodeSnap) {
    return u[grid.index(ring, static_cast<int>(nearest) % nt)];
  }
  const int j0 = static_cast<int>(std::floor(y));
  const int base = j0 - 1 + angular_shift;
  double w[4];
  lagrange4(y, base, w);
  double v = 0.0;
  for (int a = 0; a < 4; ++a) v += w[a] * u[grid.index(ring, ((base + a) % nt + nt) % nt)];
  return v;
}

// Value at signed ring index (negative rings are reflected through the pole).
double signed_ring_value(const Grid& grid, const Field& u, int ring, double theta, int shift) {
  if (ring < 0) return ring_value(grid, u, -ring, theta + std::numbers::pi, shift);
  return ring_value(grid, u, ring, theta, shift);
}

double interpolate(const Grid& grid, const Field& u, double r, double theta, int radial_shift,
                   int angular_shift) {
  if (u.size() != grid.size()) throw ParameterError("field does not match grid");
  if (!(r >= 0.0) || r > grid.R * (1.0 + 1e-12)) {
    throw DomainError("interpolation radius outside the grid");
  }
  const double x = r / grid.h;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= kNodeSnap) {
    return ring_value(grid, u, static_cast<int>(nearest), theta, angular_shift);
  }
  const int i0 = static_cast<int>(std::floor(x));
  int base = i0 - 1 + radial_shift;
  if (base + 3 > grid.nr) base = grid.nr - 3 - (radial_shift != 0 ? 1 : 0);
  double w[4];
  lagrange4(x, base, w);
  double v = 0.0;
  for (int a = 0; a < 4; ++a) v += w[a] * signed_ring_value(grid, u, base + a, theta, angular_shift);
  return v;
}

}  // namespace

double interpolate_polar(const Grid& grid, const Field& u, double r, double theta) {
  return interpolate(grid, u, r, theta, 0, 0);
}

double interpolation_error_estimate(const Grid& grid, const Field& u, double r, double theta) {
  const double v = interpolate(grid, u, r, theta, 0, 0);
  const double radial = std::abs(interpolate(grid, u, r, theta, 1, 0) - v);
  const double angular = std::abs(interpolate(grid, u, r, theta, 0, 1) - v);
  return std::max(radial, angular);
}

}  // namespace kflow
