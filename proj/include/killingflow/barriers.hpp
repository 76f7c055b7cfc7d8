#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "killingflow/geometry.hpp"

namespace kflow {

// ---------------------------------------------------------------------------
// Expanding CMC caps u+(x, t) = v_{R(t)}(r(x)) on the fixed ball B_{r0}.

// R(t) solving int_{r0}^{R} V/A = t, by safeguarded Newton on the integral.
double mu_of_t(const ModelGeometry& model, double r0, double t);
// Same radius from RK4 on dR/dt = A(R)/V(R); only used as a cross-check.
double radius_by_ode(const ModelGeometry& model, double r0, double t, int steps = 2000);

class SupersolutionFlow {
 public:
  SupersolutionFlow(const ModelGeometry& model, double r0);

  double r0() const { return r0_; }
  double radius(double t) const { return mu_of_t(*model_, r0_, t); }
  double height(double r, double t) const;                        // u+(r, t)
  std::vector<double> heights(const std::vector<double>& radii, double t) const;
  const ModelGeometry& model() const { return *model_; }

 private:
  const ModelGeometry* model_;
  double r0_;
};

double eval_u_plus(const ModelGeometry& model, double r0, double r, double t);

// Discrete radial operator: values of Q[u] at the nodes of an increasing
// radial grid.  Entries that the operator cannot evaluate (pole, boundary) are NaN.
using RadialOperator =
    std::function<std::vector<double>(const std::vector<double>& r, const std::vector<double>& u)>;

struct SupersolutionCheck {
  double min_residual = 0.0;
  double coarse_min_residual = 0.0;  // same grids with every other node dropped
  double tol_num = 0.0;              // 10 x |fine - coarse| / 3
  bool passed = false;
};

// min over interior (t, r) nodes of d_t u+ + Q[u+] with centered differences in t.
SupersolutionCheck verify_supersolution(const ModelGeometry& model, double r0,
                                        const std::vector<double>& t_grid,
                                        const std::vector<double>& r_grid,
                                        const RadialOperator& discrete_Q);
// Uniform grids: r in [0, r0] and t in [0.25, 1], `points` nodes each.
SupersolutionCheck verify_supersolution(const ModelGeometry& model, double r0, int points,
                                        const RadialOperator& discrete_Q);

// Residual field d_t u + Q[u] for an arbitrary space-time sample u[t][r].
std::vector<std::vector<double>> parabolic_residual(const std::vector<double>& t_grid,
                                                    const std::vector<double>& r_grid,
                                                    const std::vector<std::vector<double>>& u,
                                                    const RadialOperator& discrete_Q);

// ---------------------------------------------------------------------------
// Height bounds on B_{r0} x [0, T].

struct HeightBounds {
  double sup_u0 = 0.0;
  double inf_u0 = 0.0;
  double cap_height = 0.0;  // v_{R(T)}(0)
  double final_radius = 0.0;
  std::function<double(double)> lower;
  std::function<double(double)> upper;
};

// Without inf_u0 the bounds are taken symmetric about 0 (|u0| <= sup_u0).
HeightBounds height_bounds(const ModelGeometry& model, double r0, double T, double sup_u0,
                           std::optional<double> inf_u0 = std::nullopt);

// Uniform cap on u+(o, t) while R(t) <= l0 r0.
double c0_height_cap(const ModelGeometry& model, double r0, int l0, int samples = 1024);

// ---------------------------------------------------------------------------
// Boundary gradient barrier h(d) = log(1 + A d) / L.

struct BoundaryBarrier {
  double L = 0.0;
  double d0 = 0.0;
  double A_coef = 0.0;
  double extension_gradient = 0.0;  // sup |grad of the extended initial data|

  double h(double d) const;
  double h_prime(double d) const;
  double h_second(double d) const;
  double gradient_cap() const { return extension_gradient + h_prime(0.0); }
};

BoundaryBarrier make_boundary_barrier(double L, double d0, double extension_gradient = 0.0);

// ---------------------------------------------------------------------------
// Barrier at infinity over a geodesic half-plane of the hyperbolic plane.

// Geodesic perpendicular to the ray from o at polar angle `direction`, meeting
// it at distance `distance`; U is the open side not containing o.
struct HalfplaneGeodesic {
  double distance = 1.0;
  double direction = 0.0;
};

// Window of U_0 in Fermi coordinates (arclength along the geodesic from the
// foot of the perpendicular, distance from it) where the infimum defining
// alpha is sampled.
struct ScWindow {
  double along = 3.0;  // |s| <= along
  double depth = 4.0;  // d0 <= d <= d0 + depth
  int samples = 64;    // per direction
};

class ScBarrier {
 public:
  ScBarrier(const ModelGeometry& model, HalfplaneGeodesic geodesic, double C, double d0,
            ScWindow window);

  double C() const { return C_; }
  double d0() const { return d0_; }
  double alpha() const { return alpha_; }
  double C1() const { return C1_; }
  const ScWindow& window() const { return window_; }
  const HalfplaneGeodesic& geodesic() const { return geodesic_; }

  // Signed distance to the boundary geodesic, positive inside U.
  double distance(double r, double theta) const;
  // <grad r, grad d> at a point of U.
  double radial_alignment(double r, double theta) const;
  double eta(double r, double theta) const;
  double eta_of_distance(double d) const;

  // Polar coordinates (r, theta) of the Fermi point (s, d).
  std::pair<double, double> fermi_point(double along, double d) const;
  // Deterministic pseudo-random points of the window with d >= d0.
  std::vector<std::pair<double, double>> window_samples(int count, std::uint64_t seed) const;

 private:
  const ModelGeometry* model_;
  HalfplaneGeodesic geodesic_;
  double kappa_ = 1.0;
  double C_, d0_, alpha_ = 0.0, C1_ = 0.0;
  ScWindow window_;
};

ScBarrier make_sc_barrier(const ModelGeometry& model, HalfplaneGeodesic geodesic, double C,
                          double d0, ScWindow window = {});

// ---------------------------------------------------------------------------
// Interior gradient and curvature constants.

struct InteriorGradientBound {
  double beta = 0.0;
  double k = 0.0;
  double delta = 0.0;
  double delta_prime = 0.0;
  double mu = 0.0;
  double C0 = 0.0;
  double k_floor = 0.0;       // max{M L, sup(2|grad log rho|^2 + |Hess log rho|)}
  double log_branch_sup = 0.0;  // 128 (1+m)^2/m M sup xi/zeta(R)
  double log_branch_C0 = 0.0;   // 64 (1+m)^2/m M C0
  double log_bound = 0.0;       // max of both branches and 0
  double bound() const;         // exp(log_bound), +inf on overflow
};

InteriorGradientBound interior_gradient_bound(const ModelGeometry& model, double R, double M,
                                              double beta, double k, int samples = 1024);

double curvature_bound(double delta_psi, double L1, double C_sim, double C_sim_tilde,
                       double E_R, double zeta_R, double T);

// (1/delta_psi + 4) sup xi^2 + n zeta(R) sup |xi'|
double curvature_E_R(double delta_psi, double sup_xi_sq, int n, double zeta_R, double sup_xi_slope);

struct EstimateConstants {
  double beta = 0.0, delta = 0.0, delta_prime = 0.0, mu_const = 0.0, C0 = 0.0;
  double gamma = 0.0, delta_psi = 0.0, E_R = 0.0, curvature_bound = 0.0;
  double c0_cap = 0.0;
  double C_sim = 0.0, C_sim_tilde = 0.0;
  double L = 0.0, L1 = 0.0;
  double log_gradient_bound = 0.0;
  int samples = 0;
};

struct EstimateInputs {
  double R = 1.0;       // ball radius of the cylinder
  double T = 1.0;       // time horizon
  double M = 1.0;       // sup of the solution
  double sup_W2 = 2.0;  // sup of W^2 over the cylinder
  double beta = 1.0 - 1e-8;
  double k = 17.0;
  double r0 = 1.0;  // for the height cap
  int l0 = 3;
  double C_sim = 0.0;
  double C_sim_tilde = 0.0;
  int samples = 1024;
};

EstimateConstants estimate_constants(const ModelGeometry& model, const EstimateInputs& in);

// gamma = inf 1/rho^2 over B_R.
double estimate_gamma(const ModelGeometry& model, double R, int samples = 1024);

}  // namespace kflow
