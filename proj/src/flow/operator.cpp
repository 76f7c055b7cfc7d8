#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "internal.hpp"
#include "killingflow/errors.hpp"
#include "killingflow/flow.hpp"

namespace kflow {

namespace detail {

RingGeometry ring_geometry(const ModelGeometry& model, const Grid& grid) {
  RingGeometry g;
  const std::size_t m = grid.r.size();
  g.xi.resize(m);
  g.xi_slope.resize(m);
  g.rho.resize(m);
  g.rho_log_slope.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double r = grid.r[i];
    g.xi[i] = model.warp().value(r);
    g.xi_slope[i] = model.warp().d1(r);
    g.rho[i] = model.killing().value(r);
    g.rho_log_slope[i] = i == 0 ? 0.0 : model.killing().log_slope(r);
  }
  g.rho_pole = g.rho[0];
  return g;
}

namespace {

// First Fourier coefficients (2/N) sum u cos(theta), (2/N) sum u sin(theta) of a ring.
std::pair<double, double> first_mode(const Grid& grid, const Field& u, int ring) {
  double c = 0.0, s = 0.0;
  for (int j = 0; j < grid.ntheta; ++j) {
    const double v = u[grid.index(ring, j)];
    c += v * std::cos(grid.theta[j]);
    s += v * std::sin(grid.theta[j]);
  }
  return {2.0 * c / grid.ntheta, 2.0 * s / grid.ntheta};
}

}  // namespace

Gradient node_gradient(const Grid& grid, const Field& u, int ring, int angle) {
  Gradient g;
  const double h = grid.h;
  if (ring == 0) {
    if (grid.radial()) return g;
    // c1(rho) = g rho + O(rho^3); Richardson on rings 1 and 2
    const auto [c1, s1] = first_mode(grid, u, 1);
    const auto [c2, s2] = first_mode(grid, u, 2);
    g.ur = (8.0 * c1 - c2) / (6.0 * h);
    g.ut = (8.0 * s1 - s2) / (6.0 * h);
    return g;
  }
  auto at = [&](int i, int j) { return u[grid.index(i, j)]; };
  if (ring == grid.nr) {
    g.ur = (3.0 * at(ring, angle) - 4.0 * at(ring - 1, angle) + at(ring - 2, angle)) / (2.0 * h);
  } else {
    g.ur = (at(ring + 1, angle) - at(ring - 1, angle)) / (2.0 * h);
  }
  if (!grid.radial()) {
    const int nt = grid.ntheta;
    const int jp = (angle + 1) % nt, jm = (angle + nt - 1) % nt;
    g.ut = (at(ring, jp) - at(ring, jm)) / (2.0 * grid.dtheta);
  }
  return g;
}

double node_W2(const Grid& grid, const RingGeometry& geo, const Gradient& g, int ring) {
  const double rho = geo.rho[ring];
  if (ring == 0 || grid.radial()) {
    return 1.0 / (rho * rho) + g.ur * g.ur + g.ut * g.ut;
  }
  const double xi = geo.xi[ring];
  return 1.0 / (rho * rho) + g.ur * g.ur + g.ut * g.ut / (xi * xi);
}

void operator_row(const ModelGeometry& model, const Grid& grid, const RingGeometry& geo,
                  const Field& u, int ring, int angle, Row& row) {
  row.clear();
  const double h = grid.h;
  const int nt = grid.ntheta;
  const Gradient g = node_gradient(grid, u, ring, angle);
  const double W2 = node_W2(grid, geo, g, ring);

  if (ring == 0) {
    const double m = grid.pole_mass;
    if (grid.radial()) {
      row.diagonal = -1.0 / m;
      row.add(grid.index(1, 0), 1.0 / m);
      return;
    }
    // Q(0) = tr(a)/2 Delta u + (a11 - a22)/2 (u_xx - u_yy) + 2 a12 u_xy with the
    // Laplacian from the ring mean and the rest from the second Fourier mode.
    const double a11 = 1.0 - g.ur * g.ur / W2;
    const double a22 = 1.0 - g.ut * g.ut / W2;
    const double a12 = -g.ur * g.ut / W2;
    const double mean = 0.5 * (a11 + a22);
    row.diagonal = -mean / m;
    const double scale = 8.0 / (h * h * nt);
    for (int j = 0; j < nt; ++j) {
      const double th = grid.theta[j];
      row.add(grid.index(1, j), mean / (m * nt) + scale * (0.5 * (a11 - a22) * std::cos(2.0 * th) +
                                                           a12 * std::sin(2.0 * th)));
    }
    return;
  }

  const double rho = geo.rho[ring];
  const double drift = (1.0 + 1.0 / (rho * rho * W2)) * geo.rho_log_slope[ring];
  const double xi = geo.xi[ring], xi1 = geo.xi_slope[ring];
  const double arr = 1.0 - g.ur * g.ur / W2;
  const auto up = grid.index(ring + 1, angle);
  const auto down = grid.index(ring - 1, angle);

  if (grid.radial()) {
    const int n = model.n();
    const double cr = (n - 1) * xi1 / xi + drift;
    row.diagonal = -2.0 * arr / (h * h);
    row.add(up, arr / (h * h) + cr / (2.0 * h));
    row.add(down, arr / (h * h) - cr / (2.0 * h));
    return;
  }

  const double k = grid.dtheta;
  const double xi2 = xi * xi;
  const double art = -g.ur * g.ut / (xi2 * W2);
  const double att = 1.0 / xi2 - g.ut * g.ut / (xi2 * xi2 * W2);
  const double cr = att * xi * xi1 + drift;
  const double ct = -2.0 * art * xi1 / xi;
  const int jp = (angle + 1) % nt, jm = (angle + nt - 1) % nt;

  double center = -2.0 * arr / (h * h) - 2.0 * att / (k * k);
  double w_up = arr / (h * h) + cr / (2.0 * h);
  double w_down = arr / (h * h) - cr / (2.0 * h);
  double w_right = att / (k * k) + ct / (2.0 * k);
  double w_left = att / (k * k) - ct / (2.0 * k);

  // Mixed term 2 a_rt u_rt with the 7-point stencil along the diagonal whose
  // sign makes the off-diagonal corner weights non-negative.
  const double B = 2.0 * art;
  const double c = std::abs(B) / (2.0 * h * k);
  center += 2.0 * c;
  w_up -= c;
  w_down -= c;
  w_right -= c;
  w_left -= c;
  row.add(up, w_up);
  row.add(down, w_down);
  row.add(grid.index(ring, jp), w_right);
  row.add(grid.index(ring, jm), w_left);
  if (B >= 0.0) {
    row.add(grid.index(ring + 1, jp), c);
    row.add(grid.index(ring - 1, jm), c);
  } else {
    row.add(grid.index(ring + 1, jm), c);
    row.add(grid.index(ring - 1, jp), c);
  }
  row.diagonal = center;
}

// Q has no zeroth-order term, so the row weights sum to zero; applying them to
// differences keeps Q[constant] = 0 exactly instead of up to cancellation error.
double apply_row(const Row& row, std::size_t self, const Field& u) {
  const double center = u[self];
  double q = 0.0;
  for (std::size_t e = 0; e < row.index.size(); ++e) q += row.weight[e] * (u[row.index[e]] - center);
  return q;
}

}  // namespace detail

namespace {

void check_field(const Grid& grid, const Field& u) {
  if (u.size() != grid.size()) {
    throw ParameterError("field has " + std::to_string(u.size()) + " entries, grid has " +
                         std::to_string(grid.size()));
  }
}

double q_at(const ModelGeometry& model, const Grid& grid, const detail::RingGeometry& geo,
            const Field& u, int ring, int angle, detail::Row& row) {
  detail::operator_row(model, grid, geo, u, ring, angle, row);
  return detail::apply_row(row, grid.index(ring, angle), u);
}

}  // namespace

Field discretize_Q(const ModelGeometry& model, const Grid& grid, const Field& u) {
  check_field(grid, u);
  const auto geo = detail::ring_geometry(model, grid);
  Field q(grid.size(), 0.0);
  {
    detail::Row row;
    q[0] = q_at(model, grid, geo, u, 0, 0, row);
  }
#pragma omp parallel
  {
    detail::Row row;
#pragma omp for schedule(static)
    for (int ring = 1; ring < grid.nr; ++ring) {
      for (int j = 0; j < grid.ntheta; ++j) {
        q[grid.index(ring, j)] = q_at(model, grid, geo, u, ring, j, row);
      }
    }
  }
  return q;
}

Field discretize_Q_serial(const ModelGeometry& model, const Grid& grid, const Field& u) {
  check_field(grid, u);
  const auto geo = detail::ring_geometry(model, grid);
  Field q(grid.size(), 0.0);
  detail::Row row;
  q[0] = q_at(model, grid, geo, u, 0, 0, row);
  for (int ring = 1; ring < grid.nr; ++ring) {
    for (int j = 0; j < grid.ntheta; ++j) {
      q[grid.index(ring, j)] = q_at(model, grid, geo, u, ring, j, row);
    }
  }
  return q;
}

Field gradient_norm(const ModelGeometry& model, const Grid& grid, const Field& u) {
  check_field(grid, u);
  const auto geo = detail::ring_geometry(model, grid);
  Field out(grid.size());
  for (int ring = 0; ring <= grid.nr; ++ring) {
    const int count = ring == 0 ? 1 : grid.ntheta;
    for (int j = 0; j < count; ++j) {
      const auto g = detail::node_gradient(grid, u, ring, j);
      const double rho = geo.rho[ring];
      out[grid.index(ring, j)] =
          std::sqrt(std::max(0.0, detail::node_W2(grid, geo, g, ring) - 1.0 / (rho * rho)));
    }
  }
  return out;
}

Field compute_W(const ModelGeometry& model, const Grid& grid, const Field& u) {
  check_field(grid, u);
  const auto geo = detail::ring_geometry(model, grid);
  Field out(grid.size());
  for (int ring = 0; ring <= grid.nr; ++ring) {
    const int count = ring == 0 ? 1 : grid.ntheta;
    for (int j = 0; j < count; ++j) {
      const auto g = detail::node_gradient(grid, u, ring, j);
      out[grid.index(ring, j)] = std::sqrt(detail::node_W2(grid, geo, g, ring));
    }
  }
  return out;
}

double explicit_dt_limit(const ModelGeometry& model, const Grid& grid, const Field& u,
                         double cfl) {
  check_field(grid, u);
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ParameterError("cfl must lie in (0, 1]");
  const auto geo = detail::ring_geometry(model, grid);
  detail::Row row;
  double worst = 0.0;
  for (int ring = 0; ring < grid.nr; ++ring) {
    const int count = ring == 0 ? 1 : grid.ntheta;
    for (int j = 0; j < count; ++j) {
      detail::operator_row(model, grid, geo, u, ring, j, row);
      worst = std::max(worst, std::abs(row.diagonal));
    }
  }
  return worst > 0.0 ? cfl / worst : std::numeric_limits<double>::infinity();
}

double pointwise_Q(const ModelGeometry& model, const std::function<double(double, double)>& f,
                   double r, double theta, double h) {
  if (model.n() != 2) throw ParameterError("pointwise_Q is two-dimensional");
  if (!(h > 0.0) || !(r > h)) throw DomainError("pointwise_Q needs r > h > 0");
  const double xi = model.warp().value(r), xi1 = model.warp().d1(r);
  const double rho = model.killing().value(r), lr = model.killing().log_slope(r);
  const double k = h / xi;

  const double f0 = f(r, theta);
  const double fp = f(r + h, theta), fm = f(r - h, theta);
  const double fr = f(r, theta + k), fl = f(r, theta - k);
  const double ur = (fp - fm) / (2.0 * h);
  const double ut = (fr - fl) / (2.0 * k);
  const double urr = (fp - 2.0 * f0 + fm) / (h * h);
  const double utt = (fr - 2.0 * f0 + fl) / (k * k);
  const double urt = (f(r + h, theta + k) - f(r + h, theta - k) - f(r - h, theta + k) +
                      f(r - h, theta - k)) /
                     (4.0 * h * k);

  const double xi2 = xi * xi;
  const double W2 = 1.0 / (rho * rho) + ur * ur + ut * ut / xi2;
  const double arr = 1.0 - ur * ur / W2;
  const double art = -ur * ut / (xi2 * W2);
  const double att = 1.0 / xi2 - ut * ut / (xi2 * xi2 * W2);
  const double hess_rt = urt - xi1 / xi * ut;
  const double hess_tt = utt + xi * xi1 * ur;
  return arr * urr + 2.0 * art * hess_rt + att * hess_tt +
         (1.0 + 1.0 / (rho * rho * W2)) * lr * ur;
}

}  // namespace kflow
