#include <benchmark/benchmark.h>

#include "kanlm/kan.hpp"
#include "kanlm/rng.hpp"

using namespace kanlm;

namespace {

KanNetwork bench_net(const std::vector<int>& widths, int intervals) {
  std::vector<Interval> domains(widths.size() - 1, Interval{-2.5, 2.5});
  domains.front() = Interval{-1.0, 1.0};
  Rng rng(11);
  return make_network(widths, intervals, 3, domains, rng, 0.3);
}

std::vector<std::vector<double>> bench_batch(int n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> xs(n, std::vector<double>(dim));
  for (auto& x : xs)
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
  return xs;
}

}  // namespace

static void BM_NetworkForward(benchmark::State& state) {
  KanNetwork net = bench_net({2, static_cast<int>(state.range(0)), 1}, 5);
  auto xs = bench_batch(256, 2, 21);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(network_forward(net, xs[k++ & 255]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NetworkForward)->Arg(2)->Arg(5)->Arg(8);

static void BM_NetworkBackward(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  KanNetwork net = bench_net({2, hidden, 1}, 5);
  auto xs = bench_batch(640, 2, 22);
  Rng rng(23);
  std::vector<std::vector<double>> ys(xs.size(), std::vector<double>(1));
  for (auto& y : ys) y[0] = rng.normal(0.0, 1.0);
  for (auto _ : state) {
    LossGrad lg = network_backward(net, xs, ys, 1e-3);
    benchmark::DoNotOptimize(lg.grad.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_NetworkBackward)->Arg(2)->Arg(5);

static void BM_PackUnpack(benchmark::State& state) {
  KanNetwork net = bench_net({2, static_cast<int>(state.range(0)), 1}, 5);
  for (auto _ : state) {
    ParamVector p = pack(net);
    unpack(net, p);
    benchmark::DoNotOptimize(p.data());
  }
}
BENCHMARK(BM_PackUnpack)->Arg(2)->Arg(8);

BENCHMARK_MAIN();
