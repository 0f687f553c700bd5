#include <benchmark/benchmark.h>

#include "kanlm/rng.hpp"
#include "kanlm/spline.hpp"

using namespace kanlm;

static void BM_BasisRow(benchmark::State& state) {
  const int intervals = static_cast<int>(state.range(0));
  KnotGrid grid = make_grid(-1.0, 1.0, intervals, 3);
  Rng rng(1);
  std::vector<double> xs(1024);
  for (double& x : xs) x = rng.uniform(-1.0, 1.0);
  std::vector<double> row;
  std::size_t k = 0;
  for (auto _ : state) {
    row = basis_row(grid, xs[k++ & 1023]);
    benchmark::DoNotOptimize(row.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BasisRow)->Arg(5)->Arg(12)->Arg(24);

static void BM_BasisRowWithDerivative(benchmark::State& state) {
  const int intervals = static_cast<int>(state.range(0));
  KnotGrid grid = make_grid(-1.0, 1.0, intervals, 3);
  Rng rng(2);
  std::vector<double> xs(1024);
  for (double& x : xs) x = rng.uniform(-1.0, 1.0);
  std::vector<double> vals, ders;
  std::size_t k = 0;
  for (auto _ : state) {
    basis_row(grid, xs[k++ & 1023], vals, ders);
    benchmark::DoNotOptimize(vals.data());
    benchmark::DoNotOptimize(ders.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BasisRowWithDerivative)->Arg(5)->Arg(12);

static void BM_SplineEval(benchmark::State& state) {
  KnotGrid grid = make_grid(-1.0, 1.0, static_cast<int>(state.range(0)), 3);
  Rng rng(3);
  std::vector<double> coeffs(grid.basis_count());
  for (double& c : coeffs) c = rng.normal(0.0, 1.0);
  std::vector<double> xs(1024);
  for (double& x : xs) x = rng.uniform(-1.0, 1.0);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spline_eval(grid, coeffs, xs[k++ & 1023]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SplineEval)->Arg(5)->Arg(12)->Arg(24);

static void BM_RefitGrid(benchmark::State& state) {
  KnotGrid grid = make_grid(-1.0, 1.0, 5, 3);
  Rng rng(4);
  std::vector<double> coeffs(grid.basis_count());
  for (double& c : coeffs) c = rng.normal(0.0, 1.0);
  KnotGrid wider = make_grid(-1.3, 1.3, static_cast<int>(state.range(0)), 3);
  const int samples = 4 * wider.basis_count();
  for (auto _ : state) {
    std::vector<double> out = refit_grid(grid, coeffs, wider, samples);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_RefitGrid)->Arg(5)->Arg(12);

BENCHMARK_MAIN();
