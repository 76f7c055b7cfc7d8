#pragma once

#include <span>
#include <string>
#include <vector>

#include "killingflow/profile.hpp"

namespace kflow {

// Below this radius every singular radial quotient raises DomainError.
inline constexpr double kRadiusFloor = 1e-12;

struct ModelSpec {
  ProfileSpec warp = ProfileSpec::euclidean();        // metric profile of the base
  ProfileSpec lower_warp = ProfileSpec::euclidean();  // lower comparison profile
  ProfileSpec killing = ProfileSpec::constant(1.0);   // length of the Killing field
  int n = 2;
  double quad_tol = 1e-10;
  double window_end = 1e3;  // validation window; the liminf condition is only sampled here
  int ladder_points = 512;

  bool operator==(const ModelSpec&) const = default;
};

// Built-in pairs used throughout the tests and the CLI.
ModelSpec euclidean_model(int n = 2);
ModelSpec hyperbolic_model(int n = 2);       // hyperbolic base, Killing length cosh r
ModelSpec hyperbolic_base_model(int n = 2);  // hyperbolic base, Killing length 1

struct ValidationRecord {
  int samples = 0;
  double window_start = 0.0;
  double window_end = 0.0;
  double killing_log_slope_tail_min = 0.0;  // min rho'/rho over the last quarter of the ladder
};

class ModelGeometry {
 public:
  explicit ModelGeometry(ModelSpec spec);

  int n() const { return spec_.n; }
  double quad_tol() const { return spec_.quad_tol; }
  const ModelSpec& spec() const { return spec_; }
  const Profile& warp() const { return warp_; }
  const Profile& lower_warp() const { return lower_warp_; }
  const Profile& killing() const { return killing_; }
  const ValidationRecord& validation() const { return record_; }
  double r_end() const;

  double area_density(double r) const;       // rho * xi^(n-1)
  double area_log_slope(double r) const;     // (area density)' / area density
  double area_density_slope(double r) const; // (area density)'
  double enclosed_volume(double r) const;    // integral of the area density from 0
  double warp_primitive(double r) const;     // integral of xi from 0
  double sphere_mean_curvature(double r) const;             // -A/(nV), negative
  double sphere_mean_curvature_slope(double r) const;       // its r-derivative
  double cylinder_mean_curvature(double r) const;           // ((n-1)xi'/xi + rho'/rho)/n

  // Stable description of the model, and a 64-bit FNV-1a hash of it.
  std::string describe() const;
  std::string fingerprint() const;

 private:
  void validate();
  void build_caches();
  double cached_integral(const std::vector<double>& knots, double r, bool volume) const;

  ModelSpec spec_;
  Profile warp_, lower_warp_, killing_;
  ValidationRecord record_;
  double knot_step_ = 1.0 / 16.0;
  std::vector<double> volume_knots_;
  std::vector<double> primitive_knots_;
};

ModelGeometry make_model(const ModelSpec& spec);

// Christoffel symbols of the ambient metric rho^2 ds^2 + dr^2 + xi^2 (sphere metric)
// in coordinates (s, r, theta_1, ..., theta_{n-1}); index 0 is s, 1 is r.
struct Christoffel {
  int dim = 0;
  std::vector<double> data;
  double operator()(int k, int i, int j) const { return data[(k * dim + i) * dim + j]; }
  double& at(int k, int i, int j) { return data[(k * dim + i) * dim + j]; }
};

// Ricci eigenvalues in the orthonormal frame (fiber direction, radial, sphere).
struct FrameRicci {
  double fiber = 0.0;
  double radial = 0.0;
  double tangential = 0.0;
  double min() const;
};

class AmbientFrame {
 public:
  explicit AmbientFrame(const ModelGeometry& model) : model_(&model) {}

  // Diagonal of the metric; angles default to the equator (pi/2 each).
  std::vector<double> metric_diagonal(double r, std::span<const double> angles = {}) const;
  Christoffel christoffel(double r, std::span<const double> angles = {}) const;

  FrameRicci ricci(double r) const;
  // Ric(v, v) for v given by orthonormal-frame components (s, r, sphere...).
  double ricci(double r, std::span<const double> unit_direction) const;
  // Eigenvalues of Ric_g - Hess(log rho) on the base (fiber entry unused).
  FrameRicci base_drift_ricci(double r) const;

 private:
  const ModelGeometry* model_;
};

AmbientFrame ambient_frame(const ModelGeometry& model);

struct RicciBounds {
  double base_drift = 0.0;  // L
  double ambient = 0.0;     // L1
};

RicciBounds lower_ricci_bounds(const ModelGeometry& model, double R, int samples = 1024);

// Sample ladder on (0, R]: half geometric toward 0, half uniform.
std::vector<double> radial_sample_ladder(double R, int samples);

}  // namespace kflow
