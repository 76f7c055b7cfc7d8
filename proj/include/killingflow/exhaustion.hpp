#pragma once

#include <functional>
#include <string>
#include <vector>

#include "killingflow/errors.hpp"
#include "killingflow/flow.hpp"
#include "killingflow/geometry.hpp"

namespace kflow {

using AngularData = std::function<double(double)>;        // theta -> value
using PolarField = std::function<double(double, double)>;  // (r, theta) -> value

// phi extended constant along rays from o.  Discontinuous at o unless phi is constant.
PolarField radial_extension(AngularData phi);

// Smooth entire initial data agreeing with the radial extension for r >= blend_radius:
// mean(phi) + (phi(theta) - mean(phi)) * S(r / blend_radius), S a C-infinity step
// that is 0 near 0 and 1 from 1 on.
PolarField blended_extension(AngularData phi, double blend_radius);

// Trapezoid mean of phi over `samples` equally spaced angles.
double angular_mean(const AngularData& phi, int samples = 1024);

struct ExhaustionPlan {
  const ModelGeometry* model = nullptr;
  double r0 = 1.0;             // radius of the observation ball
  std::vector<double> ladder;  // increasing ball radii, ladder[0] is Lambda_0
  std::vector<double> seeds;   // r_k that produced each rung
  double T0 = 0.0;             // zeta(Lambda_0) / 2, shared by all rungs
  double growth = 2.0;
  double tol = 1e-3;
  bool stop_early = true;

  // grid and stepping template; every rung uses the same radial spacing
  int rings_per_unit = 16;
  int ntheta = 32;
  StepControl control{Scheme::semi_implicit, 0.9, 1e-2, 1e-10};
  int snapshot_every = 1;

  // inputs of the one-sided gradient and curvature checks
  double beta = 1.0 - 1e-12;
  double k = 17.0;
  double C_sim = 0.0;
  double C_sim_tilde = 0.0;
};

// Lambda_0 is the smallest integer above r0 with zeta(r0) < zeta(Lambda_0)/4; later rungs
// apply the same rule to r_{k+1} = growth * r_k (bumped if needed to stay increasing).
ExhaustionPlan build_ladder(const ModelGeometry& model, double r0, int count, double growth = 2.0);

// True iff zeta(r) < zeta(Lambda)/4 for every r <= r0 (zeta is increasing, so at r0).
bool quarter_condition(const ModelGeometry& model, double r0, double Lambda);

// Bicubic interpolation of a polar field: 4-point Lagrange in r (reflected through
// the pole) and periodic 4-point Lagrange in theta.  Exact at grid nodes.
double interpolate_polar(const Grid& grid, const Field& u, double r, double theta);
// Size of the stencil-shift difference at (r, theta); zero at grid nodes.
double interpolation_error_estimate(const Grid& grid, const Field& u, double r, double theta);

struct RungReport {
  int index = 0;
  double R = 0.0;
  int nr = 0;
  int ntheta = 0;
  double dt = 0.0;
  int steps = 0;
  // sup over the observation cylinder of |u^{next} - u^{this}|; NaN for the last rung
  double d_next = 0.0;
  double interpolation_budget = 0.0;
  double max_grad = 0.0;     // observation cylinder
  double max_A = 0.0;        // observation cylinder
  double sup_W2 = 0.0;       // B_{Lambda_0} x [0, T0]
  double curvature_bound = 0.0;  // curvature estimate with this rung's sup W^2
  double sup_abs_u = 0.0;    // whole rung cylinder
  double height_margin = 0.0;  // min of (height bound - |u|) over the rung cylinder
  double height_cap = 0.0;     // u+(o, T0) = v_{R(T0)}(o) for the rung ball
  int l0 = 0;
};

struct ConvergenceReport {
  double r0 = 0.0;
  double T0 = 0.0;
  double tol = 0.0;
  std::vector<RungReport> rungs;
  std::vector<double> d;  // d_k for consecutive solved rungs
  bool stopped_early = false;
  bool decreasing = false;  // d strictly decreasing
  bool verdict = false;     // last d below tol minus its interpolation budget

  // one-sided checks from rung 0 data (Lambda_0 plays R_1)
  double log_gradient_bound = 0.0;
  double gradient_M = 0.0;  // oscillation of u over the rung 0 cylinder (u translated to be >= 0)
  double gamma = 0.0;
  double L1 = 0.0;
  std::string estimate_note;  // set when an estimate could not be evaluated
  bool gradient_check = false;
  bool curvature_check = false;
  bool height_check = false;
};

struct RungError : Error {
  RungError(int rung, double R, const std::string& cause)
      : Error("rung " + std::to_string(rung) + " (R = " + std::to_string(R) + "): " + cause),
        rung(rung) {}
  int rung;
};

// Solves every rung on B_{R_k} x [0, T0] with Dirichlet data phi and initial data u0,
// then compares consecutive rungs on the observation cylinder B_{r0} x [0, T0].
ConvergenceReport run_exhaustion(const ExhaustionPlan& plan, const AngularData& phi,
                                 const PolarField& u0);

}  // namespace kflow
