#include <benchmark/benchmark.h>

#include "r3l/oracle.hpp"
#include "r3l/resummation.hpp"

using namespace r3l;

namespace {

// Arg 0 runs the serial reference; Arg n > 0 runs OpenMP with n threads.
Execution exec_for(const benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  return t == 0 ? Execution::serial() : Execution::openmp(t);
}

void BM_FullMatrixMC(benchmark::State& state) {
  const ModelParams p;
  ModelParams p2 = p;
  p2.M = 2.0;
  const Execution ex = exec_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(mc_full_partition_ratio(p, p2, 1u << 20, 1, ex).mean);
}

void BM_Resummation(benchmark::State& state) {
  ResumOptions opt;
  opt.exec = exec_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(resum(ModelParams{}, HalfInt(16), opt).partial_sums.back());
}

void BM_RadialQuadrature(benchmark::State& state) {
  const HalfInt j(2);
  const Spectrum s = custom_spectrum(j, {1.0, 2.0, 3.0});
  QuadratureSpec q = QuadratureSpec::tensor(1e-8);
  q.exec = exec_for(state);
  const KernelParams kp = KernelParams::for_level(j, 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(radial_quadrature_Z(s, kp, j, 1, 1, q));
}

}  // namespace

BENCHMARK(BM_FullMatrixMC)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Resummation)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RadialQuadrature)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
