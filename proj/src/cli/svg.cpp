#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "killingflow/cli.hpp"

namespace kflow {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Blue-white-red diverging map on [-1, 1].
std::string color(double s) {
  s = std::clamp(s, -1.0, 1.0);
  int r, g, b;
  if (s < 0) {
    r = g = static_cast<int>(255 * (1.0 + s));
    b = 255;
  } else {
    r = 255;
    g = b = static_cast<int>(255 * (1.0 - s));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string svg_heatmap(const Grid& grid, const Field& u, const std::string& title) {
  const double size = 400.0, cx = 220.0, cy = 230.0, scale = 180.0 / grid.R;
  double amp = 0.0;
  for (double v : u) amp = std::max(amp, std::abs(v));
  if (amp == 0.0) amp = 1.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 40 << "\" height=\""
     << size + 60 << "\">\n";
  os << "<text x=\"20\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title)
     << " (|u| max " << amp << ")</text>\n";
  const int nt = std::max(grid.ntheta, 64);
  for (int i = 0; i <= grid.nr; ++i) {
    const double r_in = i == 0 ? 0.0 : 0.5 * (grid.r[i - 1] + grid.r[i]);
    const double r_out = i == grid.nr ? grid.R : 0.5 * (grid.r[i] + grid.r[i + 1]);
    for (int j = 0; j < nt; ++j) {
      // nearest stored angle for radial (ntheta = 1) grids and coarse rings
      const int jj = grid.ntheta == 1 || i == 0 ? 0 : (j * grid.ntheta) / nt;
      const double value = u[grid.index(i, jj)];
      const double a0 = 2.0 * std::numbers::pi * j / nt, a1 = 2.0 * std::numbers::pi * (j + 1) / nt;
      auto pt = [&](double r, double a) {
        std::ostringstream p;
        p << cx + scale * r * std::cos(a) << "," << cy - scale * r * std::sin(a);
        return p.str();
      };
      os << "<polygon fill=\"" << color(value / amp) << "\" stroke=\"none\" points=\""
         << pt(r_in, a0) << " " << pt(r_out, a0) << " " << pt(r_out, a1) << " " << pt(r_in, a1)
         << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_curves(const std::vector<SvgCurve>& curves, const std::string& title,
                       const std::string& x_label, const std::string& y_label) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.x.size() && i < c.y.size(); ++i) {
      if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) continue;
      x0 = std::min(x0, c.x[i]);
      x1 = std::max(x1, c.x[i]);
      y0 = std::min(y0, c.y[i]);
      y1 = std::max(y1, c.y[i]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double W = 520, H = 360, left = 60, top = 40, pw = 420, ph = 260;
  auto X = [&](double x) { return left + pw * (x - x0) / (x1 - x0); };
  auto Y = [&](double y) { return top + ph * (1.0 - (y - y0) / (y1 - y0)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
     << escape(title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << top + ph + 36
     << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(x_label) << "</text>\n";
  os << "<text x=\"12\" y=\"" << top + ph / 2 << "\" font-family=\"sans-serif\" font-size=\"12\">"
     << escape(y_label) << "</text>\n";
  os << "<text x=\"" << left << "\" y=\"" << top + ph + 16 << "\" font-size=\"10\">" << x0
     << "</text><text x=\"" << left + pw - 30 << "\" y=\"" << top + ph + 16
     << "\" font-size=\"10\">" << x1 << "</text>\n";
  os << "<text x=\"" << 4 << "\" y=\"" << top + ph << "\" font-size=\"10\">" << y0
     << "</text><text x=\"4\" y=\"" << top + 10 << "\" font-size=\"10\">" << y1 << "</text>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const char* stroke = kPalette[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < c.x.size() && i < c.y.size(); ++i) {
      if (std::isfinite(c.x[i]) && std::isfinite(c.y[i])) os << X(c.x[i]) << "," << Y(c.y[i]) << " ";
    }
    os << "\"/>\n";
    os << "<text x=\"" << left + pw - 110 << "\" y=\"" << top + 16 + 14 * k
       << "\" font-size=\"11\" fill=\"" << stroke << "\">" << escape(c.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace kflow
