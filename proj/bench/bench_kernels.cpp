// Serial reference loops against their OpenMP counterparts.
// Argument 0 runs Execution::serial, 1 runs Execution::parallel.

#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "rotor/execution.hpp"
#include "rotor/fdtd.hpp"
#include "rotor/operators.hpp"
#include "rotor/scenario.hpp"
#include "rotor/thermal.hpp"

using namespace rotor;

namespace {

constexpr double kPi = std::numbers::pi;

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

GridConfig bench_grid() {
  GridConfig c;
  c.n_theta = 256;
  c.m_max = 16;
  c.n_phi = 68;
  c.delta_tau = 1e-4;
  return c;
}

void BM_SparseApply(benchmark::State& state) {
  const KickOperator kick(Basis(120), kPi / 4);
  const auto& op = kick.op();
  std::vector<cplx> x(op.dimension(), cplx(1.0, 0.5)), y(op.dimension());
  for (auto _ : state) {
    op.apply(x, y, mode(state));
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["nnz"] = static_cast<double>(op.matrix().nnz());
}

void BM_CrankNicolson(benchmark::State& state) {
  const auto cfg = bench_grid();
  auto g = grid_from_eigenstate(3, 1, cfg);
  GridKicker(cfg).apply(g, {4.0, kPi / 4, 0.0});
  const CrankNicolson cn(cfg);
  for (auto _ : state) cn.step(g, 10, mode(state));
}

void BM_GridKick(benchmark::State& state) {
  const auto cfg = bench_grid();
  const GridKicker kicker(cfg);
  auto g = grid_from_eigenstate(3, 1, cfg);
  for (auto _ : state) {
    auto h = g;
    kicker.apply(h, {2.0, kPi / 4, 0.0}, mode(state));
    benchmark::DoNotOptimize(h);
  }
}

void BM_EnsembleProtocol(benchmark::State& state) {
  const auto gas = build_ensemble({{"N2", 1.9896, 0.7, 2.0, 1.0}, 50.0, 1e-6});
  DoublePulseProtocol p;
  p.p1 = 4.0;
  p.p2 = 4.0;
  p.pol_angle = kPi / 4;
  p.sampling.samples_per_revival = 256;
  RunOptions opts;
  opts.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(p, gas, opts).final_jy);
  state.counters["members"] = static_cast<double>(gas.size());
}

}  // namespace

BENCHMARK(BM_SparseApply)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CrankNicolson)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridKick)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleProtocol)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
