#pragma once

#include <functional>
#include <string>
#include <vector>

#include "killingflow/barriers.hpp"
#include "killingflow/geometry.hpp"

namespace kflow {

// Polar grid on the closed geodesic ball B_R: a single pole node plus `nr`
// rings r_i = i h (i = 1..nr, r_nr = R), each with `ntheta` uniform angles.
// ntheta == 1 is the radial fast path (any n); ntheta >= 8 needs n = 2.
struct Grid {
  int nr = 0;
  int ntheta = 0;
  double R = 0.0;
  double h = 0.0;
  double dtheta = 0.0;
  std::vector<double> r;      // r[0] = 0, ..., r[nr] = R
  std::vector<double> theta;  // ntheta angles in [0, 2 pi)
  double pole_mass = 0.0;     // m(h) = int_0^h (int_0^s xi^{n-1}) / xi^{n-1}(s) ds

  std::size_t size() const { return 1 + static_cast<std::size_t>(nr) * ntheta; }
  std::size_t index(int ring, int angle) const {
    return ring == 0 ? 0 : 1 + static_cast<std::size_t>(ring - 1) * ntheta + angle;
  }
  bool radial() const { return ntheta == 1; }
};

Grid make_grid(const ModelGeometry& model, double R, int nr, int ntheta);

using Field = std::vector<double>;

struct BallProblem {
  const ModelGeometry* model = nullptr;
  double R = 1.0;
  double T = 0.0;
  std::function<double(double)> phi;                 // boundary data on r = R
  std::function<double(double, double)> u0;         // initial data (r, theta)
  bool radial_data = false;                          // phi constant and u0 radial
};

// T <= 0 selects zeta(R)/2.  Checks u0(R, .) = phi to 1e-12 on 256 angles.
BallProblem make_ball_problem(const ModelGeometry& model, double R,
                              std::function<double(double)> phi,
                              std::function<double(double, double)> u0, double T = 0.0);
// Radial data: constant boundary value and u0 depending on r only.
BallProblem make_radial_problem(const ModelGeometry& model, double R, double boundary_value,
                                std::function<double(double)> u0, double T = 0.0);

struct FlowState {
  double t = 0.0;
  Field u;
  Field W;
  long step_count = 0;
};

enum class Scheme { explicit_euler, semi_implicit };
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct StepControl {
  Scheme scheme = Scheme::semi_implicit;
  double cfl = 0.9;
  double dt_max = 1e-3;
  double tol_lin = 1e-10;
};

// ---------------------------------------------------------------------------
// Operator

// Q[u] on every node; the boundary ring carries 0 (Dirichlet rows).
Field discretize_Q(const ModelGeometry& model, const Grid& grid, const Field& u);
// Single-threaded reference; bit-identical to discretize_Q.
Field discretize_Q_serial(const ModelGeometry& model, const Grid& grid, const Field& u);

// W = (rho^-2 + |grad u|^2)^{1/2} with the same difference stencils as Q.
Field compute_W(const ModelGeometry& model, const Grid& grid, const Field& u);
// |grad u| per node.
Field gradient_norm(const ModelGeometry& model, const Grid& grid, const Field& u);

// Largest stable explicit step for the frozen coefficients at u.
double explicit_dt_limit(const ModelGeometry& model, const Grid& grid, const Field& u, double cfl);

// Q at an arbitrary point for a function given in polar coordinates (n = 2),
// by central differences of step h in r and h / xi(r) in theta.
double pointwise_Q(const ModelGeometry& model, const std::function<double(double, double)>& f,
                   double r, double theta, double h);

// Radial operator on an increasing (possibly nonuniform) grid starting at 0,
// for any n; NaN on the last node.  Matches the barriers::RadialOperator handle.
std::vector<double> radial_Q(const ModelGeometry& model, const std::vector<double>& r,
                             const std::vector<double>& u);
RadialOperator radial_operator(const ModelGeometry& model);

// ---------------------------------------------------------------------------
// Time stepping

FlowState initial_state(const BallProblem& problem, const Grid& grid);
FlowState step(const FlowState& state, const BallProblem& problem, const Grid& grid,
               const StepControl& control, double dt);

struct Trajectory {
  Grid grid;
  StepControl control;
  double T = 0.0;
  double dt = 0.0;
  std::vector<FlowState> snapshots;
  std::vector<double> times;          // snapshot times
  std::vector<double> max_gradient;   // max |grad u| per snapshot
  std::vector<double> max_curvature;  // max |A| over the interior per snapshot
  double divergence_guard = 0.0;
};

// Integrates to problem.T with uniform steps T / ceil(T / dt_max); snapshots
// every `snapshot_every` steps plus the initial and final states.
Trajectory solve_ball(const BallProblem& problem, const Grid& grid, const StepControl& control,
                      int snapshot_every = 0);
// Radial fast path: ntheta = 1 grid of nr rings.
Trajectory radial_solve(const BallProblem& problem, int nr, const StepControl& control,
                        int snapshot_every = 0);

// ---------------------------------------------------------------------------
// Geometry of the graph

struct CurvatureFields {
  Field A_squared;      // |A|^2, NaN on the boundary ring
  Field mean_curvature;  // nH = trace of the shape operator, NaN on the boundary ring
};

CurvatureFields second_fundamental_form(const ModelGeometry& model, const Grid& grid,
                                        const Field& u);

struct IdentityReport {
  double evolW_max = 0.0;       // max |residual| of the W evolution identity
  double par_s_max = 0.0;       // max |residual| of the s evolution identity
  double par_zeta_min_slack = 0.0;
  int snapshots_used = 0;
  int nodes_per_snapshot = 0;
};

// Radial trajectories only (ntheta = 1), at least 3 snapshots.
IdentityReport residual_identities(const ModelGeometry& model, const Trajectory& trajectory);

// ---------------------------------------------------------------------------
// Snapshot I/O: one CSV per snapshot (t,r,theta,u,W) plus a JSON manifest.

struct RunManifest {
  std::string model_fingerprint;
  std::string model_description;
  int nr = 0, ntheta = 0;
  double R = 0.0, T = 0.0, dt = 0.0;
  StepControl control;
  std::vector<double> times;
  std::vector<std::string> files;
  bool operator==(const RunManifest& o) const;
};

std::string snapshot_csv(const Grid& grid, const FlowState& state);
RunManifest write_run(const std::string& directory, const ModelGeometry& model,
                      const Trajectory& trajectory);
std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

}  // namespace kflow
