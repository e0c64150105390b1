#include <benchmark/benchmark.h>

#include "coherence/coherence.hpp"

namespace {

using namespace coherence;

void BM_ClosedFormRing(benchmark::State& state) {
  const auto spec = ring_spectrum(static_cast<int>(state.range(0)), 1.0);
  const DapiGains gains{1, 0, 1, 1, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(vn_value(spec, gains));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClosedFormRing)->RangeMultiplier(4)->Range(64, 4096);

void BM_ModalOracleRing(benchmark::State& state) {
  const auto spec = ring_spectrum(static_cast<int>(state.range(0)), 1.0);
  const FdpdGains gains{1, 1, 1, 1, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(vn_modal_oracle(spec, gains).v_n);
}
BENCHMARK(BM_ModalOracleRing)->Arg(256)->Arg(4096);

void BM_SchurLyapunov(benchmark::State& state) {
  const auto sys = assemble(build_ring(static_cast<int>(state.range(0)), 1.0), PGains{1, 1, 1, 0});
  const auto deflated = deflate_average_mode(sys);
  const Eigen::MatrixXd q = deflated.c.transpose() * deflated.c;
  for (auto _ : state) benchmark::DoNotOptimize(solve_lyapunov_schur(deflated.a, q).data());
}
BENCHMARK(BM_SchurLyapunov)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_EulerMaruyamaSteps(benchmark::State& state) {
  const auto sys = assemble(build_path(static_cast<int>(state.range(0)), 1.0),
                            DapiGains{1, 0, 1, 1, 0.1});
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.horizon = 10.0;
  cfg.record_every = 100;
  cfg.record_states = false;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_em(sys, cfg).output.data());
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_EulerMaruyamaSteps)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_CStarNumeric(benchmark::State& state) {
  const auto spec = path_spectrum(static_cast<int>(state.range(0)), 1.0);
  const DapiGains gains{1, 0, 1, 1, 0};
  for (auto _ : state) benchmark::DoNotOptimize(c_star_numeric(spec, gains).c_star);
}
BENCHMARK(BM_CStarNumeric)->Arg(10)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
