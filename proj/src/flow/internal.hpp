#pragma once

// Stencil machinery shared by the operator, the stepper and the curvature code.

#include <vector>

#include "killingflow/flow.hpp"

namespace kflow::detail {

double pole_mass(const ModelGeometry& model, double h);

// Profile values on the ring radii.
struct RingGeometry {
  std::vector<double> xi, xi_slope, rho, rho_log_slope;
  double rho_pole = 1.0;
};
RingGeometry ring_geometry(const ModelGeometry& model, const Grid& grid);

struct Gradient {
  double ur = 0.0;  // radial derivative (Cartesian x-derivative at the pole)
  double ut = 0.0;  // angular derivative (Cartesian y-derivative at the pole)
};

// First derivatives: central inside, one-sided second order on the boundary
// ring, Fourier-mode extrapolation at the pole.
Gradient node_gradient(const Grid& grid, const Field& u, int ring, int angle);

// W^2 from a node gradient (the pole gradient is Cartesian).
double node_W2(const Grid& grid, const RingGeometry& geo, const Gradient& g, int ring);

struct Row {
  std::vector<std::size_t> index;
  std::vector<double> weight;
  double diagonal = 0.0;  // weight on the node itself
  void clear() {
    index.clear();
    weight.clear();
    diagonal = 0.0;
  }
  void add(std::size_t i, double w) {
    index.push_back(i);
    weight.push_back(w);
  }
};

// Linear stencil of Q with coefficients frozen at u; ring < nr.
void operator_row(const ModelGeometry& model, const Grid& grid, const RingGeometry& geo,
                  const Field& u, int ring, int angle, Row& row);

double apply_row(const Row& row, std::size_t self, const Field& u);

}  // namespace kflow::detail
