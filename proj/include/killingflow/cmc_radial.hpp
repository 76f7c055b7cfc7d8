#pragma once

#include <vector>

#include "killingflow/geometry.hpp"

namespace kflow {

// Rotationally invariant graph over B_R with constant mean curvature H(R) and
// zero boundary values.
struct CmcProfile {
  double R = 0.0;
  double mean_curvature = 0.0;  // H(R), negative
  std::vector<double> r;
  std::vector<double> v;
  std::vector<double> vp;  // -inf at r = R
};

// Uniform on [0, 0.95R], geometric clustering toward R on the last 5%.
// `intervals` intervals, intervals + 1 nodes.
std::vector<double> clustered_grid(double R, int intervals);

CmcProfile solve_cmc_graph(const ModelGeometry& model, double R, int grid_size);

// Single-point evaluations of the profile height and slope.
double cmc_height(const ModelGeometry& model, double R, double r);
double cmc_slope(const ModelGeometry& model, double R, double r);

// Heights at increasing radii in [0, R], accumulated panel by panel from r = R.
std::vector<double> cmc_heights(const ModelGeometry& model, double R,
                                const std::vector<double>& radii);

struct ProfileCurve {
  std::vector<double> arclength;
  std::vector<double> r;
  std::vector<double> s;
  std::vector<double> angle;
};

// RK4 on the arclength-parametrized generating curve, started at (R, 0, pi/2).
// Stops once r drops below two steps or the arclength budget runs out.
// A budget <= 0 selects 2 (R + rho(R) v_R(0)), which exceeds the curve length.
ProfileCurve integrate_profile_curve(const ModelGeometry& model, double R, double step,
                                     double arclength_budget = 0.0);

// Max deviation of the divergence-form radial operator from nH(R) on the
// interior grid, skipping the two nodes next to r = R.
double cmc_residual(const ModelGeometry& model, const CmcProfile& profile);

}  // namespace kflow
