#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kflow {

// Radial profile kinds.  `constant` and `cosh` are analytic stand-ins for the
// Killing-length profiles used throughout (rho = 1, rho = cosh r); a table of the
// same values works too but only to interpolation accuracy.
enum class ProfileKind { euclidean, hyperbolic, constant, cosh, table };

struct ProfileSpec {
  ProfileKind kind = ProfileKind::euclidean;
  double kappa = 1.0;  // curvature scale for hyperbolic / cosh
  double level = 1.0;  // value for constant
  std::vector<double> table_r;
  std::vector<double> table_value;

  static ProfileSpec euclidean();
  static ProfileSpec hyperbolic(double kappa = 1.0);
  static ProfileSpec constant(double level = 1.0);
  static ProfileSpec cosh(double kappa = 1.0);
  static ProfileSpec table(std::vector<double> r, std::vector<double> value);

  bool operator==(const ProfileSpec&) const = default;
};

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

// Reads `r,value` CSV.  Lines starting with '#' and blank lines are skipped.
ProfileSpec parse_profile_table(std::istream& in);
ProfileSpec load_profile_table(const std::string& path);

class Profile {
 public:
  Profile() = default;
  explicit Profile(ProfileSpec spec);

  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
  // f'/f and f''/f, evaluated without forming overflowing intermediates.
  double log_slope(double r) const;
  double curvature_ratio(double r) const;

  // Largest radius the profile is defined on (infinite for analytic kinds).
  double r_end() const;
  const ProfileSpec& spec() const { return spec_; }
  std::string describe() const;

 private:
  struct Cell {
    int index;
    double t;
    double h;
  };
  Cell locate(double r) const;

  ProfileSpec spec_;
  std::vector<double> slopes_;  // monotone cubic node derivatives (tables only)
};

}  // namespace kflow
