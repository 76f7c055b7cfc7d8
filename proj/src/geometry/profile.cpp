#include "killingflow/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "killingflow/errors.hpp"

namespace kflow {

ProfileSpec ProfileSpec::euclidean() { return ProfileSpec{}; }

ProfileSpec ProfileSpec::hyperbolic(double kappa) {
  if (!(kappa > 0.0)) throw ParameterError("hyperbolic profile needs kappa > 0");
  ProfileSpec s;
  s.kind = ProfileKind::hyperbolic;
  s.kappa = kappa;
  return s;
}

ProfileSpec ProfileSpec::constant(double level) {
  if (!(level > 0.0)) throw ParameterError("constant profile needs a positive level");
  ProfileSpec s;
  s.kind = ProfileKind::constant;
  s.level = level;
  return s;
}

ProfileSpec ProfileSpec::cosh(double kappa) {
  if (!(kappa > 0.0)) throw ParameterError("cosh profile needs kappa > 0");
  ProfileSpec s;
  s.kind = ProfileKind::cosh;
  s.kappa = kappa;
  return s;
}

ProfileSpec ProfileSpec::table(std::vector<double> r, std::vector<double> value) {
  if (r.size() != value.size()) throw TableFormatError("table columns differ in length");
  if (r.size() < 4) throw TableFormatError("table needs at least 4 samples");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i]) || !std::isfinite(value[i])) {
      throw TableFormatError("non-finite table entry at row " + std::to_string(i));
    }
    if (i > 0 && !(r[i] > r[i - 1])) {
      throw TableFormatError("table radii must be strictly increasing (row " + std::to_string(i) +
                             ")");
    }
  }
  if (r.front() != 0.0) throw TableFormatError("table must start at r = 0");
  ProfileSpec s;
  s.kind = ProfileKind::table;
  s.table_r = std::move(r);
  s.table_value = std::move(value);
  return s;
}

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::euclidean: return "euclidean";
    case ProfileKind::hyperbolic: return "hyperbolic";
    case ProfileKind::constant: return "constant";
    case ProfileKind::cosh: return "cosh";
    case ProfileKind::table: return "table";
  }
  return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "euclidean") return ProfileKind::euclidean;
  if (name == "hyperbolic") return ProfileKind::hyperbolic;
  if (name == "constant") return ProfileKind::constant;
  if (name == "cosh") return ProfileKind::cosh;
  if (name == "table") return ProfileKind::table;
  throw ParameterError("unknown profile kind '" + name + "'");
}

ProfileSpec parse_profile_table(std::istream& in) {
  std::vector<double> r, v;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!header_seen) {
      if (line != "r,value") {
        throw TableFormatError("expected header 'r,value' at line " + std::to_string(lineno));
      }
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw TableFormatError("missing comma at line " + std::to_string(lineno));
    }
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      const double x = std::stod(a, &used);
      if (a.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(a);
      const double y = std::stod(b, &used);
      if (b.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(b);
      r.push_back(x);
      v.push_back(y);
    } catch (const std::logic_error&) {
      throw TableFormatError("unparsable number at line " + std::to_string(lineno));
    }
  }
  if (!header_seen) throw TableFormatError("empty table");
  return ProfileSpec::table(std::move(r), std::move(v));
}

ProfileSpec load_profile_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TableFormatError("cannot open table '" + path + "'");
  return parse_profile_table(in);
}

namespace {

// Fritsch-Carlson node slopes (harmonic-mean form with the three-point end rule).
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), m(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0)) return 3.0 * d0;
    return s;
  };
  m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return m;
}

}  // namespace

Profile::Profile(ProfileSpec spec) : spec_(std::move(spec)) {
  if (spec_.kind == ProfileKind::table) {
    // Re-run the table checks in case the spec was assembled by hand.
    spec_ = ProfileSpec::table(spec_.table_r, spec_.table_value);
    slopes_ = monotone_slopes(spec_.table_r, spec_.table_value);
  }
}

double Profile::r_end() const {
  if (spec_.kind == ProfileKind::table) return spec_.table_r.back();
  return std::numeric_limits<double>::infinity();
}

Profile::Cell Profile::locate(double r) const {
  const auto& x = spec_.table_r;
  if (r < 0.0 || r > x.back() * (1.0 + 1e-12)) {
    throw DomainError("radius " + std::to_string(r) + " outside table range [0, " +
                      std::to_string(x.back()) + "]");
  }
  r = std::min(r, x.back());
  auto it = std::upper_bound(x.begin(), x.end(), r);
  int i = static_cast<int>(it - x.begin()) - 1;
  i = std::clamp(i, 0, static_cast<int>(x.size()) - 2);
  const double h = x[i + 1] - x[i];
  return {i, (r - x[i]) / h, h};
}

double Profile::value(double r) const {
  const double k = spec_.kappa;
  switch (spec_.kind) {
    case ProfileKind::euclidean: return r;
    case ProfileKind::hyperbolic: return std::sinh(k * r) / k;
    case ProfileKind::constant: return spec_.level;
    case ProfileKind::cosh: return std::cosh(k * r);
    case ProfileKind::table: {
      const Cell c = locate(r);
      const auto& y = spec_.table_value;
      const double t = c.t, t2 = t * t, t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * y[c.index] + (t3 - 2 * t2 + t) * c.h * slopes_[c.index] +
             (-2 * t3 + 3 * t2) * y[c.index + 1] + (t3 - t2) * c.h * slopes_[c.index + 1];
    }
  }
  return 0.0;
}

double Profile::d1(double r) const {
  const double k = spec_.kappa;
  switch (spec_.kind) {
    case ProfileKind::euclidean: return 1.0;
    case ProfileKind::hyperbolic: return std::cosh(k * r);
    case ProfileKind::constant: return 0.0;
    case ProfileKind::cosh: return k * std::sinh(k * r);
    case ProfileKind::table: {
      const Cell c = locate(r);
      const auto& y = spec_.table_value;
      const double t = c.t, t2 = t * t;
      return ((6 * t2 - 6 * t) * y[c.index] + (-6 * t2 + 6 * t) * y[c.index + 1]) / c.h +
             (3 * t2 - 4 * t + 1) * slopes_[c.index] + (3 * t2 - 2 * t) * slopes_[c.index + 1];
    }
  }
  return 0.0;
}

double Profile::d2(double r) const {
  const double k = spec_.kappa;
  switch (spec_.kind) {
    case ProfileKind::euclidean: return 0.0;
    case ProfileKind::hyperbolic: return k * std::sinh(k * r);
    case ProfileKind::constant: return 0.0;
    case ProfileKind::cosh: return k * k * std::cosh(k * r);
    case ProfileKind::table: {
      const Cell c = locate(r);
      const auto& y = spec_.table_value;
      const double t = c.t;
      return ((12 * t - 6) * y[c.index] + (-12 * t + 6) * y[c.index + 1]) / (c.h * c.h) +
             ((6 * t - 4) * slopes_[c.index] + (6 * t - 2) * slopes_[c.index + 1]) / c.h;
    }
  }
  return 0.0;
}

double Profile::log_slope(double r) const {
  const double k = spec_.kappa;
  switch (spec_.kind) {
    case ProfileKind::euclidean: return 1.0 / r;
    case ProfileKind::hyperbolic: return k / std::tanh(k * r);
    case ProfileKind::constant: return 0.0;
    case ProfileKind::cosh: return k * std::tanh(k * r);
    case ProfileKind::table: return d1(r) / value(r);
  }
  return 0.0;
}

double Profile::curvature_ratio(double r) const {
  const double k = spec_.kappa;
  switch (spec_.kind) {
    case ProfileKind::euclidean: return 0.0;
    case ProfileKind::hyperbolic: return k * k;
    case ProfileKind::constant: return 0.0;
    case ProfileKind::cosh: return k * k;
    case ProfileKind::table: return d2(r) / value(r);
  }
  return 0.0;
}

std::string Profile::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(spec_.kind);
  switch (spec_.kind) {
    case ProfileKind::hyperbolic:
    case ProfileKind::cosh: os << "(kappa=" << spec_.kappa << ")"; break;
    case ProfileKind::constant: os << "(" << spec_.level << ")"; break;
    case ProfileKind::table:
      os << "(" << spec_.table_r.size() << " samples on [0, " << spec_.table_r.back() << "])";
      break;
    default: break;
  }
  return os.str();
}

}  // namespace kflow
