#include <algorithm>
#include <cmath>
#include <numbers>

#include "killingflow/errors.hpp"
#include "killingflow/geometry.hpp"

// Closed forms are derived in docs/derivations.md.

namespace kflow {

double FrameRicci::min() const { return std::min({fiber, radial, tangential}); }

AmbientFrame ambient_frame(const ModelGeometry& model) { return AmbientFrame(model); }

namespace {

std::vector<double> equator_angles(int count, std::span<const double> angles) {
  if (angles.empty()) return std::vector<double>(count, std::numbers::pi / 2);
  if (static_cast<int>(angles.size()) != count) {
    throw ParameterError("expected " + std::to_string(count) + " sphere angles");
  }
  return {angles.begin(), angles.end()};
}

}  // namespace

std::vector<double> AmbientFrame::metric_diagonal(double r, std::span<const double> angles) const {
  const int n = model_->n();
  const auto th = equator_angles(n - 1, angles);
  std::vector<double> g(n + 1);
  const double rho = model_->killing().value(r);
  const double xi = model_->warp().value(r);
  g[0] = rho * rho;
  g[1] = 1.0;
  double sphere = 1.0;
  for (int a = 0; a < n - 1; ++a) {
    g[2 + a] = xi * xi * sphere;
    sphere *= std::sin(th[a]) * std::sin(th[a]);
  }
  return g;
}

Christoffel AmbientFrame::christoffel(double r, std::span<const double> angles) const {
  if (r < kRadiusFloor) throw DomainError("Christoffel symbols need r > r_min");
  const int n = model_->n();
  const int dim = n + 1;
  const auto th = equator_angles(n - 1, angles);
  const auto g = metric_diagonal(r, th);

  // dg[k][i] = d_k g_ii
  std::vector<double> dg(dim * dim, 0.0);
  const double rho_ls = model_->killing().log_slope(r);
  const double xi_ls = model_->warp().log_slope(r);
  dg[1 * dim + 0] = 2.0 * rho_ls * g[0];
  for (int a = 0; a < n - 1; ++a) {
    dg[1 * dim + 2 + a] = 2.0 * xi_ls * g[2 + a];
    for (int b = 0; b < a; ++b) {
      dg[(2 + b) * dim + 2 + a] = 2.0 * g[2 + a] * std::cos(th[b]) / std::sin(th[b]);
    }
  }

  Christoffel G;
  G.dim = dim;
  G.data.assign(dim * dim * dim, 0.0);
  for (int k = 0; k < dim; ++k) {
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        double v = 0.0;
        if (k == j) v += dg[i * dim + k];
        if (k == i) v += dg[j * dim + k];
        if (i == j) v -= dg[k * dim + i];
        G.at(k, i, j) = v / (2.0 * g[k]);
      }
    }
  }
  return G;
}

FrameRicci AmbientFrame::ricci(double r) const {
  if (r < kRadiusFloor) throw DomainError("Ricci evaluation needs r > r_min");
  const int n = model_->n();
  const auto& rho = model_->killing();
  const auto& xi = model_->warp();
  const double r1 = rho.log_slope(r), r2 = rho.curvature_ratio(r);
  const double x1 = xi.log_slope(r), x2 = xi.curvature_ratio(r);
  double sphere_term = 0.0;
  if (n > 2) {
    const double v = xi.value(r);
    sphere_term = (n - 2) * (1.0 / (v * v) - x1 * x1);
  }
  FrameRicci out;
  out.fiber = -(r2 + (n - 1) * r1 * x1);
  out.radial = -(n - 1) * x2 - r2;
  out.tangential = -x2 + sphere_term - r1 * x1;
  return out;
}

double AmbientFrame::ricci(double r, std::span<const double> unit_direction) const {
  const int n = model_->n();
  if (static_cast<int>(unit_direction.size()) != n + 1) {
    throw ParameterError("direction must have n+1 orthonormal components");
  }
  const FrameRicci f = ricci(r);
  double v = f.fiber * unit_direction[0] * unit_direction[0] +
             f.radial * unit_direction[1] * unit_direction[1];
  for (int a = 2; a <= n; ++a) v += f.tangential * unit_direction[a] * unit_direction[a];
  return v;
}

FrameRicci AmbientFrame::base_drift_ricci(double r) const {
  if (r < kRadiusFloor) throw DomainError("Ricci evaluation needs r > r_min");
  const int n = model_->n();
  const auto& rho = model_->killing();
  const auto& xi = model_->warp();
  const double r1 = rho.log_slope(r), r2 = rho.curvature_ratio(r);
  const double x1 = xi.log_slope(r), x2 = xi.curvature_ratio(r);
  double sphere_term = 0.0;
  if (n > 2) {
    const double v = xi.value(r);
    sphere_term = (n - 2) * (1.0 / (v * v) - x1 * x1);
  }
  FrameRicci out;
  out.fiber = 0.0;
  out.radial = -(n - 1) * x2 - (r2 - r1 * r1);
  out.tangential = -x2 + sphere_term - r1 * x1;
  return out;
}

RicciBounds lower_ricci_bounds(const ModelGeometry& model, double R, int samples) {
  if (!(R > 0.0)) throw ParameterError("lower_ricci_bounds needs R > 0");
  const AmbientFrame frame(model);
  RicciBounds b;
  for (double r : radial_sample_ladder(R, samples)) {
    const FrameRicci base = frame.base_drift_ricci(r);
    b.base_drift = std::max(b.base_drift, -std::min(base.radial, base.tangential));
    b.ambient = std::max(b.ambient, -frame.ricci(r).min());
  }
  return b;
}

}  // namespace kflow
