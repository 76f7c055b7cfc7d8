#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "doctest.h"
#include "killingflow/errors.hpp"
#include "killingflow/exhaustion.hpp"

using namespace kflow;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed-form warp primitives for the two built-in bases.
double zeta_euclidean(double r) { return 0.5 * r * r; }
double zeta_hyperbolic(double r) { return std::cosh(r) - 1.0; }

// Smallest integer above `seed` (and above `floor_value`) passing the quarter inequality.
template <class Zeta>
double oracle_rung(Zeta zeta, double seed, double floor_value) {
  double L = std::max(std::floor(seed) + 1.0, floor_value + 1.0);
  while (!(zeta(seed) < 0.25 * zeta(L))) L += 1.0;
  return L;
}

Field sample(const Grid& g, const PolarField& f) {
  Field u(g.size());
  u[0] = f(0.0, 0.0);
  for (int i = 1; i <= g.nr; ++i) {
    for (int j = 0; j < g.ntheta; ++j) u[g.index(i, j)] = f(g.r[i], g.theta[j]);
  }
  return u;
}

// Smooth in Cartesian coordinates, so regular across the pole.
double cartesian_test(double r, double theta) {
  const double x = r * std::cos(theta), y = r * std::sin(theta);
  return std::sin(0.7 * x) * std::cos(0.4 * y) + 0.3 * x * y;
}

ExhaustionPlan small_plan(const ModelGeometry& model) {
  ExhaustionPlan plan = build_ladder(model, 1.0, 2);
  plan.rings_per_unit = 6;
  plan.ntheta = 16;
  plan.control.dt_max = 0.05;
  plan.stop_early = false;
  return plan;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("radial extension is constant along rays") {
  const auto one = radial_extension([](double) { return 1.0; });
  const auto cosine = radial_extension([](double th) { return std::cos(th); });
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> rad(0.0, 50.0), ang(0.0, 2.0 * kPi);
  for (int i = 0; i < 200; ++i) {
    const double r = rad(rng), th = ang(rng);
    CHECK(one(r, th) == 1.0);
    CHECK(cosine(r, th) == std::cos(th));
  }
  // restriction to any circle is phi itself
  for (double r : {0.25, 1.0, 7.0}) {
    for (int j = 0; j < 64; ++j) {
      const double th = 2.0 * kPi * j / 64;
      CHECK(cosine(r, th) == std::cos(th));
    }
  }
  CHECK_THROWS_AS(radial_extension(AngularData{}), ParameterError);
}

TEST_CASE("blended extension: smooth at the pole, radial outside the blend radius") {
  const AngularData phi = [](double th) { return 0.5 * std::cos(th) + 0.2; };
  CHECK(angular_mean(phi) == doctest::Approx(0.2).epsilon(1e-14));
  const auto u0 = blended_extension(phi, 1.0);
  for (int j = 0; j < 32; ++j) {
    const double th = 2.0 * kPi * j / 32;
    CHECK(u0(0.0, th) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(u0(1e-3, th) == doctest::Approx(0.2).epsilon(1e-14));  // flat step near 0
    for (double r : {1.0, 1.5, 4.0}) CHECK(u0(r, th) == phi(th));
  }
  // bounded by the range of phi and monotone along rays between mean and phi
  for (int j = 0; j < 16; ++j) {
    const double th = 2.0 * kPi * j / 16;
    double last = u0(0.0, th);
    for (int i = 1; i <= 100; ++i) {
      const double v = u0(0.01 * i, th);
      CHECK(std::abs(v - 0.2) >= std::abs(last - 0.2) - 1e-15);
      CHECK(std::abs(v - 0.2) <= std::abs(phi(th) - 0.2) + 1e-15);
      last = v;
    }
  }
  // no jump anywhere: second differences stay small at a fine step
  const double h = 1e-4;
  double worst = 0.0;
  for (int i = 1; i < 12000; ++i) {
    const double r = i * h;
    worst = std::max(worst, std::abs(u0(r + h, 0.3) - 2.0 * u0(r, 0.3) + u0(r - h, 0.3)));
  }
  CHECK(worst < 1e-6);
  CHECK_THROWS_AS(blended_extension(phi, 0.0), ParameterError);
  CHECK_THROWS_AS(blended_extension(AngularData{}, 1.0), ParameterError);
  CHECK_THROWS_AS(angular_mean(phi, 0), ParameterError);
}

TEST_CASE("build_ladder matches the quarter inequality evaluated directly") {
  const ModelGeometry eu{euclidean_model(2)};
  const ModelGeometry hy{hyperbolic_model(2)};

  SUBCASE("first rung examples") {
    // euclidean: zeta(1) = 0.5, zeta(2)/4 = 0.5 fails strictly, zeta(3)/4 = 1.125
    CHECK(build_ladder(eu, 1.0, 2).ladder.front() == 3.0);
    CHECK(!(zeta_euclidean(1.0) < 0.25 * zeta_euclidean(2.0)));
    // hyperbolic: 0.5431 < (cosh 2 - 1)/4
    CHECK(build_ladder(hy, 1.0, 2).ladder.front() == 2.0);
    CHECK(zeta_hyperbolic(1.0) < 0.25 * zeta_hyperbolic(2.0));
  }

  SUBCASE("whole ladders and T0") {
    for (int which = 0; which < 2; ++which) {
      const ModelGeometry& model = which == 0 ? eu : hy;
      auto zeta = [which](double r) { return which == 0 ? zeta_euclidean(r) : zeta_hyperbolic(r); };
      for (double r0 : {0.5, 1.0, 1.7}) {
        const auto plan = build_ladder(model, r0, 5);
        REQUIRE(plan.ladder.size() == 5);
        double seed = r0, previous = 0.0;
        for (std::size_t k = 0; k < plan.ladder.size(); ++k) {
          const double expected = oracle_rung(zeta, seed, previous);
          CHECK(plan.ladder[k] == expected);
          CHECK(plan.seeds[k] == doctest::Approx(seed));
          CHECK(quarter_condition(model, r0, plan.ladder[k]));
          if (k > 0) CHECK(plan.ladder[k] > plan.ladder[k - 1]);
          previous = expected;
          seed *= 2.0;
        }
        CHECK(plan.T0 == doctest::Approx(0.5 * zeta(plan.ladder.front())).epsilon(1e-10));
      }
    }
  }

  SUBCASE("growth factor is configurable") {
    const auto plan = build_ladder(eu, 1.0, 4, 3.0);
    // seeds 1, 3, 9, 27 need Lambda > 2 * seed
    CHECK(plan.ladder == std::vector<double>{3.0, 7.0, 19.0, 55.0});
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(build_ladder(eu, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(build_ladder(eu, 0.0, 3), ParameterError);
    CHECK_THROWS_AS(build_ladder(eu, 1.0, 3, 1.0), ParameterError);
    // a tabulated warp that ends at r = 6 cannot host the rung for seed 4
    ModelSpec spec = euclidean_model(2);
    std::vector<double> r, v;
    for (int i = 0; i <= 600; ++i) {
      r.push_back(0.01 * i);
      v.push_back(0.01 * i);
    }
    spec.warp = ProfileSpec::table(r, v);
    spec.lower_warp = spec.warp;
    spec.window_end = 6.0;
    const ModelGeometry short_model{spec};
    CHECK_NOTHROW(build_ladder(short_model, 1.0, 2));
    CHECK_THROWS_AS(build_ladder(short_model, 1.0, 4), DomainError);
  }
}

TEST_CASE("polar interpolation is the identity on its own grid") {
  const ModelGeometry eu{euclidean_model(2)};
  const Grid g = make_grid(eu, 3.0, 24, 32);
  const Field u = sample(g, cartesian_test);
  double worst = 0.0, budget = 0.0;
  for (int i = 0; i <= g.nr; ++i) {
    const int count = i == 0 ? 1 : g.ntheta;
    for (int j = 0; j < count; ++j) {
      const double th = i == 0 ? 0.0 : g.theta[j];
      worst = std::max(worst, std::abs(interpolate_polar(g, u, g.r[i], th) - u[g.index(i, j)]));
      budget = std::max(budget, interpolation_error_estimate(g, u, g.r[i], th));
      // the same node reached through a shifted angle
      if (i > 0) {
        const double wrapped = interpolate_polar(g, u, g.r[i], th + 4.0 * kPi);
        worst = std::max(worst, std::abs(wrapped - u[g.index(i, j)]));
      }
    }
  }
  CHECK(worst <= 1e-12);
  CHECK(budget == 0.0);
  CHECK_THROWS_AS(interpolate_polar(g, u, 3.5, 0.0), DomainError);
}

TEST_CASE("polar interpolation converges at fourth order off the nodes") {
  const ModelGeometry eu{euclidean_model(2)};
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> rad(0.0, 2.9), ang(0.0, 2.0 * kPi);
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 300; ++i) pts.emplace_back(rad(rng), ang(rng));
  for (int i = 0; i < 20; ++i) pts.emplace_back(0.05 * rad(rng) / 2.9, ang(rng));  // near the pole

  std::vector<double> errors;
  double budget_ratio = 0.0;
  for (int level : {1, 2, 4}) {
    const Grid g = make_grid(eu, 3.0, 12 * level, 16 * level);
    const Field u = sample(g, cartesian_test);
    double worst = 0.0, worst_budget = 0.0;
    for (auto [r, th] : pts) {
      worst = std::max(worst, std::abs(interpolate_polar(g, u, r, th) - cartesian_test(r, th)));
      worst_budget = std::max(worst_budget, interpolation_error_estimate(g, u, r, th));
    }
    errors.push_back(worst);
    budget_ratio = worst_budget / worst;
  }
  const double order1 = std::log2(errors[0] / errors[1]);
  const double order2 = std::log2(errors[1] / errors[2]);
  INFO("errors " << errors[0] << " " << errors[1] << " " << errors[2]);
  CHECK(order1 > 3.0);
  CHECK(order2 > 3.0);
  // the stencil-shift estimate is the same order of magnitude as the true error
  CHECK(budget_ratio > 0.1);
}

TEST_CASE("zero data gives identical rungs") {
  const ModelGeometry hy{hyperbolic_model(2)};
  auto plan = small_plan(hy);
  plan.ladder = {2.0, 3.0, 4.0};
  const AngularData zero = [](double) { return 0.0; };
  const auto rep = run_exhaustion(plan, zero, radial_extension(zero));
  REQUIRE(rep.d.size() == 2);
  for (double d : rep.d) CHECK(d == 0.0);
  CHECK(rep.verdict);
  CHECK(!rep.decreasing);  // 0 < 0 fails: strict decrease needs movement
  for (const auto& r : rep.rungs) {
    CHECK(r.max_grad == 0.0);
    CHECK(r.sup_abs_u == 0.0);
    CHECK(r.height_margin >= 0.0);
  }
}

TEST_CASE("a small euclidean run is consistent and deterministic") {
  const ModelGeometry eu{euclidean_model(2)};
  const auto plan = small_plan(eu);
  const AngularData phi = [](double th) { return 0.5 * std::cos(th); };
  const auto a = run_exhaustion(plan, phi, blended_extension(phi, 1.0));
  const auto b = run_exhaustion(plan, phi, blended_extension(phi, 1.0));

  REQUIRE(a.rungs.size() == 2);
  REQUIRE(a.d.size() == 1);
  CHECK(a.d[0] >= 0.0);
  CHECK(a.rungs[0].d_next == a.d[0]);
  CHECK(std::isnan(a.rungs[1].d_next));
  const double budget = a.rungs[0].interpolation_budget + a.rungs[1].interpolation_budget;
  CHECK(a.verdict == (a.d[0] < plan.tol - budget));
  CHECK(a.rungs[0].nr == 18);
  CHECK(a.rungs[1].nr == 30);
  CHECK(a.T0 == doctest::Approx(2.25));
  CHECK(a.height_check);
  CHECK(a.gradient_check);
  CHECK(a.curvature_check);
  // max principle: boundary data and initial data lie in [-0.5, 0.5]
  for (const auto& r : a.rungs) CHECK(r.sup_abs_u <= 0.5 + 1e-9);

  REQUIRE(b.rungs.size() == a.rungs.size());
  CHECK(same_bits(a.d[0], b.d[0]));
  CHECK(same_bits(a.log_gradient_bound, b.log_gradient_bound));
  for (std::size_t k = 0; k < a.rungs.size(); ++k) {
    CHECK(same_bits(a.rungs[k].max_grad, b.rungs[k].max_grad));
    CHECK(same_bits(a.rungs[k].max_A, b.rungs[k].max_A));
    CHECK(same_bits(a.rungs[k].height_margin, b.rungs[k].height_margin));
  }
}

TEST_CASE("early stop once the tolerance is met") {
  const ModelGeometry hy{hyperbolic_model(2)};
  auto plan = small_plan(hy);
  plan.ladder = {2.0, 4.0, 6.0, 10.0};
  plan.stop_early = true;
  plan.tol = 1.0;  // the first comparison already passes
  const AngularData phi = [](double th) { return 0.5 * std::cos(th); };
  const auto rep = run_exhaustion(plan, phi, blended_extension(phi, 1.0));
  CHECK(rep.stopped_early);
  CHECK(rep.rungs.size() == 2);
  CHECK(rep.verdict);
}

TEST_CASE("plan validation and rung-tagged errors") {
  const ModelGeometry eu{euclidean_model(2)};
  const AngularData phi = [](double th) { return 0.5 * std::cos(th); };
  const auto u0 = blended_extension(phi, 1.0);

  auto plan = small_plan(eu);
  plan.ladder = {5.0, 3.0};
  CHECK_THROWS_AS(run_exhaustion(plan, phi, u0), ParameterError);
  plan.ladder = {2.0, 5.0};  // 2 fails the quarter condition for r0 = 1
  CHECK_THROWS_AS(run_exhaustion(plan, phi, u0), ParameterError);
  plan.ladder = {3.0};
  CHECK_THROWS_AS(run_exhaustion(plan, phi, u0), ParameterError);
  plan = small_plan(eu);
  plan.tol = 0.0;
  CHECK_THROWS_AS(run_exhaustion(plan, phi, u0), ParameterError);
  plan = small_plan(eu);
  plan.model = nullptr;
  CHECK_THROWS_AS(run_exhaustion(plan, phi, u0), ParameterError);

  plan = small_plan(eu);
  plan.ntheta = 3;  // rejected by the grid builder inside rung 0
  try {
    run_exhaustion(plan, phi, u0);
    FAIL("expected a rung error");
  } catch (const RungError& e) {
    CHECK(e.rung == 0);
    CHECK(std::string(e.what()).find("rung 0") != std::string::npos);
  }

  // initial data inconsistent with phi on the rung boundary
  plan = small_plan(eu);
  try {
    run_exhaustion(plan, phi, radial_extension([](double) { return 0.0; }));
    FAIL("expected a rung error");
  } catch (const RungError& e) {
    CHECK(e.rung == 0);
  }
}
