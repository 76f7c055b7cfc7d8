#include <cmath>
#include <numbers>
#include <string>

#include "killingflow/errors.hpp"
#include "killingflow/exhaustion.hpp"

namespace kflow {

namespace {

// exp(-1/x) for x > 0, 0 otherwise
double flat_ramp(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = flat_ramp(x), b = flat_ramp(1.0 - x);
  return a / (a + b);
}

}  // namespace

PolarField radial_extension(AngularData phi) {
  if (!phi) throw ParameterError("radial extension needs boundary data");
  return [phi = std::move(phi)](double, double theta) { return phi(theta); };
}

double angular_mean(const AngularData& phi, int samples) {
  if (samples < 1) throw ParameterError("angular mean needs samples >= 1");
  double sum = 0.0;
  for (int j = 0; j < samples; ++j) sum += phi(2.0 * std::numbers::pi * j / samples);
  return sum / samples;
}

PolarField blended_extension(AngularData phi, double blend_radius) {
  if (!phi) throw ParameterError("blended extension needs boundary data");
  if (!(blend_radius > 0.0)) throw ParameterError("blend radius must be positive");
  const double mean = angular_mean(phi);
  return [phi = std::move(phi), mean, blend_radius](double r, double theta) {
    const double s = smooth_step(r / blend_radius);
    if (s == 1.0) return phi(theta);
    return mean + (phi(theta) - mean) * s;
  };
}

bool quarter_condition(const ModelGeometry& model, double r0, double Lambda) {
  return model.warp_primitive(r0) < 0.25 * model.warp_primitive(Lambda);
}

ExhaustionPlan build_ladder(const ModelGeometry& model, double r0, int count, double growth) {
  if (count < 2) throw ParameterError("exhaustion ladder needs at least 2 rungs");
  if (!(r0 > 0.0)) throw ParameterError("exhaustion ladder needs r0 > 0");
  if (!(growth > 1.0)) throw ParameterError("ladder growth factor must exceed 1");
  constexpr double kSearchLimit = 1e6;

  ExhaustionPlan plan;
  plan.model = &model;
  plan.r0 = r0;
  plan.growth = growth;
  double seed = r0;
  double previous = 0.0;
  for (int k = 0; k < count; ++k) {
    double Lambda = std::max(std::floor(seed) + 1.0, previous + 1.0);
    while (!quarter_condition(model, seed, Lambda)) {
      Lambda += 1.0;
      if (Lambda >= kSearchLimit || Lambda > model.r_end()) {
        throw DomainError("exhaustion ladder: no integer radius below " +
                          std::to_string(std::min(kSearchLimit, model.r_end())) +
                          " satisfies the quarter condition for r = " + std::to_string(seed));
      }
    }
    plan.ladder.push_back(Lambda);
    plan.seeds.push_back(seed);
    previous = Lambda;
    seed *= growth;
  }
  plan.T0 = 0.5 * model.warp_primitive(plan.ladder.front());
  return plan;
}

}  // namespace kflow
