#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "killingflow/cmc_radial.hpp"
#include "killingflow/config.hpp"
#include "killingflow/exhaustion.hpp"

namespace kflow {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand; args excludes the program name.  Reports go to `out`
// (or the --out path), diagnostics and usage to `err`.  Never throws.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Applies KILLINGFLOW_THREADS (a positive integer) as an upper bound on the
// OpenMP team size.  Returns the resulting thread cap.
int apply_thread_cap();

// RFC 4180 field quoting: quoted iff the field holds a comma, quote, CR or LF.
std::string csv_field(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);
// Shortest round-trip decimal form.
std::string format_double(double x);

// Report builders shared by the subcommands and the tests.
Json model_json(const ModelGeometry& model, const std::string& name);
Json model_info_report(const ModelGeometry& model, const std::string& name, int samples);
Json cmc_report(const ModelGeometry& model, const std::string& name, const CmcProfile& profile);
std::string cmc_csv(const CmcProfile& profile);
Json flow_report(const ModelGeometry& model, const std::string& name, const Trajectory& traj);
Json exhaust_report(const ModelGeometry& model, const std::string& name,
                    const ExhaustionPlan& plan, const ConvergenceReport& report);

// SVG drawings: polar heatmap of a field, and radial curves.
std::string svg_heatmap(const Grid& grid, const Field& u, const std::string& title);
struct SvgCurve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
std::string svg_curves(const std::vector<SvgCurve>& curves, const std::string& title,
                       const std::string& x_label, const std::string& y_label);

}  // namespace kflow
