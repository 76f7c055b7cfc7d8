#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

#include "killingflow/errors.hpp"
#include "killingflow/geometry.hpp"
#include "killingflow/quadrature.hpp"

namespace kflow {

ModelSpec euclidean_model(int n) {
  ModelSpec s;
  s.n = n;
  return s;
}

ModelSpec hyperbolic_model(int n) {
  ModelSpec s;
  s.warp = ProfileSpec::hyperbolic(1.0);
  s.lower_warp = ProfileSpec::hyperbolic(1.0);
  s.killing = ProfileSpec::cosh(1.0);
  s.n = n;
  return s;
}

ModelSpec hyperbolic_base_model(int n) {
  ModelSpec s = hyperbolic_model(n);
  s.killing = ProfileSpec::constant(1.0);
  return s;
}

std::vector<double> radial_sample_ladder(double R, int samples) {
  std::vector<double> out;
  if (!(R > 0.0) || samples < 4) return out;
  out.reserve(samples);
  const double knee = std::min(R, 1.0);
  const int geometric = (R <= 1.0) ? samples : samples / 4;
  const double start = 1e-6 * knee;
  for (int i = 0; i < geometric; ++i) {
    out.push_back(start * std::pow(knee / start, static_cast<double>(i) / (geometric - 1)));
  }
  const int uniform = samples - geometric;
  for (int i = 1; i <= uniform; ++i) out.push_back(knee + (R - knee) * i / uniform);
  return out;
}

ModelGeometry::ModelGeometry(ModelSpec spec) : spec_(std::move(spec)) {
  if (spec_.n < 2) throw ParameterError("model dimension n must be >= 2");
  if (!(spec_.quad_tol > 0.0)) throw ParameterError("quad_tol must be positive");
  if (!(spec_.window_end > 0.0)) throw ParameterError("validation window must be positive");
  if (spec_.ladder_points < 16) throw ParameterError("validation ladder needs >= 16 points");
  warp_ = Profile(spec_.warp);
  lower_warp_ = Profile(spec_.lower_warp);
  killing_ = Profile(spec_.killing);
  validate();
  build_caches();
}

ModelGeometry make_model(const ModelSpec& spec) { return ModelGeometry(spec); }

double ModelGeometry::r_end() const {
  return std::min({warp_.r_end(), lower_warp_.r_end(), killing_.r_end()});
}

void ModelGeometry::validate() {
  auto zero_at_pole = [](const Profile& p, const char* name) {
    if (p.spec().kind == ProfileKind::table && std::abs(p.value(0.0)) > 1e-12) {
      throw ValidationError(0.0, std::string(name) + "(0) = 0");
    }
  };
  zero_at_pole(warp_, "xi");
  zero_at_pole(lower_warp_, "iota");
  if (!(killing_.value(0.0) > 0.0)) throw ValidationError(0.0, "rho(0) > 0");

  const double end = std::min(spec_.window_end, r_end());
  const auto ladder = radial_sample_ladder(end, spec_.ladder_points);
  auto below = [](double lhs, double rhs) {
    return lhs <= rhs + 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
  };
  double tail_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double r = ladder[k];
    if (!(warp_.value(r) > 0.0)) throw ValidationError(r, "xi > 0");
    if (!(lower_warp_.value(r) > 0.0)) throw ValidationError(r, "iota > 0");
    if (!(killing_.value(r) > 0.0)) throw ValidationError(r, "rho > 0");
    const double rho_ls = killing_.log_slope(r);
    if (!below(rho_ls, warp_.log_slope(r))) throw ValidationError(r, "rho'/rho <= xi'/xi");
    if (!below(rho_ls, lower_warp_.log_slope(r))) {
      throw ValidationError(r, "rho'/rho <= iota'/iota");
    }
    if (!below(lower_warp_.curvature_ratio(r), warp_.curvature_ratio(r))) {
      throw ValidationError(r, "iota''/iota <= xi''/xi");
    }
    if (4 * k >= 3 * ladder.size()) tail_min = std::min(tail_min, rho_ls);
  }
  record_.samples = static_cast<int>(ladder.size());
  record_.window_start = ladder.front();
  record_.window_end = ladder.back();
  record_.killing_log_slope_tail_min = tail_min;
}

void ModelGeometry::build_caches() {
  const double end = std::min(40.0, r_end());
  const int panels = static_cast<int>(std::floor(end / knot_step_));
  const double panel_tol = spec_.quad_tol / std::max(1, panels);
  volume_knots_.assign(1, 0.0);
  primitive_knots_.assign(1, 0.0);
  auto area = [this](double r) { return area_density(r); };
  auto xi = [this](double r) { return warp_.value(r); };
  for (int k = 0; k < panels; ++k) {
    const double a = k * knot_step_, b = (k + 1) * knot_step_;
    const double dv = adaptive_simpson(area, a, b, panel_tol).value;
    const double dz = adaptive_simpson(xi, a, b, panel_tol).value;
    if (!std::isfinite(volume_knots_.back() + dv)) break;
    volume_knots_.push_back(volume_knots_.back() + dv);
    primitive_knots_.push_back(primitive_knots_.back() + dz);
  }
}

double ModelGeometry::cached_integral(const std::vector<double>& knots, double r,
                                      bool volume) const {
  if (!(r >= 0.0)) throw DomainError("negative radius " + std::to_string(r));
  if (r == 0.0) return 0.0;
  if (r > r_end() * (1.0 + 1e-12)) throw DomainError("radius beyond the profile tables");
  const int last = static_cast<int>(knots.size()) - 1;
  const int k = std::min(last, static_cast<int>(std::floor(r / knot_step_)));
  const double a = k * knot_step_;
  if (a == r) return knots[k];
  const double tol = 0.5 * spec_.quad_tol;
  double extra;
  if (volume) {
    extra = adaptive_simpson([this](double s) { return area_density(s); }, a, r, tol).value;
  } else {
    extra = adaptive_simpson([this](double s) { return warp_.value(s); }, a, r, tol).value;
  }
  return knots[k] + extra;
}

double ModelGeometry::area_density(double r) const {
  if (r < 0.0) throw DomainError("negative radius " + std::to_string(r));
  return killing_.value(r) * std::pow(warp_.value(r), spec_.n - 1);
}

double ModelGeometry::area_log_slope(double r) const {
  if (r < kRadiusFloor) throw DomainError("area log-slope needs r > r_min");
  return killing_.log_slope(r) + (spec_.n - 1) * warp_.log_slope(r);
}

double ModelGeometry::area_density_slope(double r) const {
  if (r < 0.0) throw DomainError("negative radius " + std::to_string(r));
  const int n = spec_.n;
  const double xi = warp_.value(r);
  double out = killing_.d1(r) * std::pow(xi, n - 1);
  if (n > 1) out += (n - 1) * killing_.value(r) * std::pow(xi, n - 2) * warp_.d1(r);
  return out;
}

double ModelGeometry::enclosed_volume(double r) const {
  return cached_integral(volume_knots_, r, true);
}

double ModelGeometry::warp_primitive(double r) const {
  return cached_integral(primitive_knots_, r, false);
}

double ModelGeometry::sphere_mean_curvature(double r) const {
  if (r < kRadiusFloor) throw DomainError("sphere mean curvature needs r > r_min");
  return -area_density(r) / (spec_.n * enclosed_volume(r));
}

double ModelGeometry::sphere_mean_curvature_slope(double r) const {
  const double H = sphere_mean_curvature(r);
  return H * (area_log_slope(r) + spec_.n * H);
}

double ModelGeometry::cylinder_mean_curvature(double r) const {
  if (r < kRadiusFloor) throw DomainError("cylinder mean curvature needs r > r_min");
  return ((spec_.n - 1) * warp_.log_slope(r) + killing_.log_slope(r)) / spec_.n;
}

namespace {

void describe_profile(std::ostringstream& os, const ProfileSpec& p) {
  os << to_string(p.kind);
  if (p.kind == ProfileKind::hyperbolic || p.kind == ProfileKind::cosh) os << "(" << p.kappa << ")";
  if (p.kind == ProfileKind::constant) os << "(" << p.level << ")";
  if (p.kind == ProfileKind::table) {
    os << "[";
    for (std::size_t i = 0; i < p.table_r.size(); ++i) {
      os << p.table_r[i] << ":" << p.table_value[i] << (i + 1 < p.table_r.size() ? "," : "");
    }
    os << "]";
  }
}

}  // namespace

std::string ModelGeometry::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << spec_.n << ";xi=";
  describe_profile(os, spec_.warp);
  os << ";iota=";
  describe_profile(os, spec_.lower_warp);
  os << ";rho=";
  describe_profile(os, spec_.killing);
  os << ";quad_tol=" << spec_.quad_tol << ";window=" << spec_.window_end
     << ";ladder=" << spec_.ladder_points;
  return os.str();
}

std::string ModelGeometry::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : describe()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace kflow
