#include <cmath>
#include <limits>

#include "internal.hpp"
#include "killingflow/errors.hpp"
#include "killingflow/flow.hpp"

namespace kflow {

namespace {

struct Shape {
  double trace = 0.0;
  double square = 0.0;
};

// Shape operator S = g^{-1} b of a 2x2 symmetric pair.
Shape shape_2x2(double g11, double g12, double g22, double b11, double b12, double b22) {
  const double det = g11 * g22 - g12 * g12;
  const double i11 = g22 / det, i12 = -g12 / det, i22 = g11 / det;
  const double s11 = i11 * b11 + i12 * b12;
  const double s12 = i11 * b12 + i12 * b22;
  const double s21 = i12 * b11 + i22 * b12;
  const double s22 = i12 * b12 + i22 * b22;
  return {s11 + s22, s11 * s11 + 2.0 * s12 * s21 + s22 * s22};
}

// Graph F(r, th) = (u, r, th) in coordinates (s, r, th).  Tangents
// F_r = (ur, 1, 0), F_th = (ut, 0, 1); b_ij = <D_{F_i} F_j, N> with
// N = (rho^-2, -ur, -ut/xi^2) / W, which equals -<D_i N, F_j>.
Shape polar_shape(double ur, double ut, double urr, double urt, double utt,
                  const std::vector<double>& metric, const Christoffel& G) {
  const double W = std::sqrt(1.0 / metric[0] + ur * ur + ut * ut / metric[2]);
  const double N[3] = {1.0 / (metric[0] * W), -ur / W, -ut / (metric[2] * W)};
  const double F[2][3] = {{ur, 1.0, 0.0}, {ut, 0.0, 1.0}};
  const double second[2][2] = {{urr, urt}, {urt, utt}};
  double b[2][2], g[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double bij = 0.0, gij = 0.0;
      for (int k = 0; k < 3; ++k) {
        double V = k == 0 ? second[i][j] : 0.0;
        for (int a = 0; a < 3; ++a) {
          for (int c = 0; c < 3; ++c) V += G(k, a, c) * F[i][a] * F[j][c];
        }
        bij += metric[k] * V * N[k];
        gij += metric[k] * F[i][k] * F[j][k];
      }
      b[i][j] = bij;
      g[i][j] = gij;
    }
  }
  return shape_2x2(g[0][0], g[0][1], g[1][1], b[0][0], b[0][1], b[1][1]);
}

}  // namespace

CurvatureFields second_fundamental_form(const ModelGeometry& model, const Grid& grid,
                                        const Field& u) {
  if (u.size() != grid.size()) throw ParameterError("field does not match grid");
  const auto geo = detail::ring_geometry(model, grid);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CurvatureFields out;
  out.A_squared.assign(grid.size(), nan);
  out.mean_curvature.assign(grid.size(), nan);
  const double h = grid.h;
  const double rho0 = geo.rho_pole;
  auto at = [&](int i, int j) { return u[grid.index(i, j)]; };

  if (grid.radial()) {
    const int n = model.n();
    // umbilic pole: every principal curvature equals u''(0) / W(0)
    const double kappa0 = rho0 * (at(1, 0) - at(0, 0)) / (n * grid.pole_mass);
    out.A_squared[0] = n * kappa0 * kappa0;
    out.mean_curvature[0] = n * kappa0;
    for (int i = 1; i < grid.nr; ++i) {
      const double ur = (at(i + 1, 0) - at(i - 1, 0)) / (2.0 * h);
      const double urr = (at(i + 1, 0) - 2.0 * at(i, 0) + at(i - 1, 0)) / (h * h);
      const double rho = geo.rho[i], rho1 = rho * geo.rho_log_slope[i];
      const double W = std::sqrt(1.0 / (rho * rho) + ur * ur);
      const double k_radial =
          (urr + 2.0 * geo.rho_log_slope[i] * ur + rho * rho1 * ur * ur * ur) / (rho * rho * W * W * W);
      const double k_sphere = ur * geo.xi_slope[i] / (geo.xi[i] * W);
      out.A_squared[grid.index(i, 0)] = k_radial * k_radial + (n - 1) * k_sphere * k_sphere;
      out.mean_curvature[grid.index(i, 0)] = k_radial + (n - 1) * k_sphere;
    }
    return out;
  }

  {
    // Pole in normal coordinates: Christoffel symbols vanish and rho'(0) = 0.
    const auto g = detail::node_gradient(grid, u, 0, 0);
    const int nt = grid.ntheta;
    double mean = 0.0, c2 = 0.0, s2 = 0.0;
    for (int j = 0; j < nt; ++j) {
      const double v = at(1, j);
      mean += v;
      c2 += v * std::cos(2.0 * grid.theta[j]);
      s2 += v * std::sin(2.0 * grid.theta[j]);
    }
    mean /= nt;
    c2 *= 2.0 / nt;
    s2 *= 2.0 / nt;
    const double lap = (mean - at(0, 0)) / grid.pole_mass;
    const double diff = 4.0 * c2 / (h * h);
    const double H11 = 0.5 * (lap + diff), H22 = 0.5 * (lap - diff), H12 = 2.0 * s2 / (h * h);
    const double W = std::sqrt(1.0 / (rho0 * rho0) + g.ur * g.ur + g.ut * g.ut);
    const double r2 = rho0 * rho0;
    const auto s = shape_2x2(1.0 + r2 * g.ur * g.ur, r2 * g.ur * g.ut, 1.0 + r2 * g.ut * g.ut,
                             H11 / W, H12 / W, H22 / W);
    out.A_squared[0] = s.square;
    out.mean_curvature[0] = s.trace;
  }

  const double k = grid.dtheta;
  const int nt = grid.ntheta;
  const AmbientFrame frame(model);
  for (int i = 1; i < grid.nr; ++i) {
    const auto metric = frame.metric_diagonal(grid.r[i]);
    const auto G = frame.christoffel(grid.r[i]);
    for (int j = 0; j < nt; ++j) {
      const int jp = (j + 1) % nt, jm = (j + nt - 1) % nt;
      const double ur = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
      const double ut = (at(i, jp) - at(i, jm)) / (2.0 * k);
      const double urr = (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (h * h);
      const double utt = (at(i, jp) - 2.0 * at(i, j) + at(i, jm)) / (k * k);
      const double urt =
          (at(i + 1, jp) - at(i + 1, jm) - at(i - 1, jp) + at(i - 1, jm)) / (4.0 * h * k);
      const auto s = polar_shape(ur, ut, urr, urt, utt, metric, G);
      out.A_squared[grid.index(i, j)] = s.square;
      out.mean_curvature[grid.index(i, j)] = s.trace;
    }
  }
  return out;
}

}  // namespace kflow
