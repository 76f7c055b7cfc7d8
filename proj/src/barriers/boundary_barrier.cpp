#include <cmath>
#include <string>

#include "killingflow/barriers.hpp"
#include "killingflow/errors.hpp"

namespace kflow {

BoundaryBarrier make_boundary_barrier(double L, double d0, double extension_gradient) {
  if (!(L > 0.0)) throw ParameterError("boundary barrier needs L > 0");
  if (!(d0 > 0.0) || !(L * d0 < 1.0)) {
    throw ParameterError("boundary barrier needs 0 < d0 < 1/L (got d0 = " + std::to_string(d0) +
                         ", 1/L = " + std::to_string(1.0 / L) + ")");
  }
  if (!(extension_gradient >= 0.0)) throw ParameterError("extension gradient must be >= 0");
  BoundaryBarrier b;
  b.L = L;
  b.d0 = d0;
  b.A_coef = L / (1.0 - L * d0);
  b.extension_gradient = extension_gradient;
  return b;
}

double BoundaryBarrier::h(double d) const { return std::log1p(A_coef * d) / L; }

double BoundaryBarrier::h_prime(double d) const { return A_coef / (L * (1.0 + A_coef * d)); }

double BoundaryBarrier::h_second(double d) const {
  const double s = 1.0 + A_coef * d;
  return -A_coef * A_coef / (L * s * s);
}

}  // namespace kflow
