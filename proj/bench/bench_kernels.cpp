// Serial reference vs OpenMP kernel for the discrete operator, on the polar grids
// the exhaustion rungs use.  Run with KILLINGFLOW_THREADS or OMP_NUM_THREADS to
// vary the team size.

#include <benchmark/benchmark.h>

#include <cmath>

#include "killingflow/flow.hpp"

namespace {

using namespace kflow;

struct Fixture {
  ModelGeometry model{hyperbolic_model(2)};
  Grid grid;
  Field u;

  explicit Fixture(int nr) : grid(make_grid(model, 4.0, nr, 64)), u(grid.size()) {
    u[0] = 0.0;
    for (int i = 1; i <= grid.nr; ++i) {
      for (int j = 0; j < grid.ntheta; ++j) {
        u[grid.index(i, j)] = 0.5 * grid.r[i] / grid.R * std::cos(grid.theta[j]);
      }
    }
  }
};

void BM_discretize_Q(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(discretize_Q(f.model, f.grid, f.u));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.grid.size()));
}

void BM_discretize_Q_serial(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(discretize_Q_serial(f.model, f.grid, f.u));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.grid.size()));
}

void BM_compute_W(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_W(f.model, f.grid, f.u));
}

}  // namespace

BENCHMARK(BM_discretize_Q)->Arg(64)->Arg(256);
BENCHMARK(BM_discretize_Q_serial)->Arg(64)->Arg(256);
BENCHMARK(BM_compute_W)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
