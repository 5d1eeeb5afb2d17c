#include <benchmark/benchmark.h>

#include <random>

#include "robsub/robsub.hpp"

using namespace robsub;

namespace {

Mat gaussian(Index n, Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Mat a(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) a(i, j) = g(rng);
  return a;
}

void BM_SymEig(benchmark::State& state) {
  const Index n = state.range(0);
  const Mat a = gaussian(n, n, 1);
  const Mat s = symmetrize(a);
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(s));
}
BENCHMARK(BM_SymEig)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_PsdOracle(benchmark::State& state) {
  const Index n = state.range(0);
  const Mat a = gaussian(n, 2 * n, 2);
  const Mat b = a * a.transpose() / static_cast<double>(2 * n);
  for (auto _ : state) benchmark::DoNotOptimize(q_to_qstar_psd_oracle(b, Exponent::infinity(), 20, 3));
}
BENCHMARK(BM_PsdOracle)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_ProjectSpectrahedron(benchmark::State& state) {
  const Index n = state.range(0);
  const Mat y = symmetrize(gaussian(n, n, 4));
  for (auto _ : state) benchmark::DoNotOptimize(project_spectrahedron(y, 2.0, false));
}
BENCHMARK(BM_ProjectSpectrahedron)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_FrobeniusRelax(benchmark::State& state) {
  const Index n = state.range(0);
  const DataMatrix a(gaussian(n, 4 * n, 5));
  const RobustnessBudget budget(Exponent::infinity(), 2.0);
  SolveParams p;
  for (auto _ : state) benchmark::DoNotOptimize(solve_frobenius_relax(a, 1, budget, p));
}
BENCHMARK(BM_FrobeniusRelax)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_SpectralRelax(benchmark::State& state) {
  const Index n = state.range(0);
  const DataMatrix a(gaussian(n, 4 * n, 6));
  const RobustnessBudget budget(Exponent::infinity(), 2.0);
  SolveParams p;
  for (auto _ : state) benchmark::DoNotOptimize(solve_spectral_relax(a, 1, budget, p));
}
BENCHMARK(BM_SpectralRelax)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_RobustMean(benchmark::State& state) {
  const Index n = state.range(0);
  const MeanInstance inst = make_sparse_mean_instance(n, 5, 0.1, 10 * n, Exponent::infinity(), 7);
  SolveParams p;
  p.tol_objective = 1e-2;
  p.tol_feasibility = 5e-2;
  for (auto _ : state) benchmark::DoNotOptimize(robust_mean(inst.A, inst.kappa, 0.1, Exponent::infinity(), p));
}
BENCHMARK(BM_RobustMean)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SpikeDetect(benchmark::State& state) {
  const SpikeModel model = make_sparse_spike(30, 1, 3, 1.0, 1.0, 8);
  const DataMatrix a = scm_sample(model, 300, 9);
  SolveParams p;
  for (auto _ : state) benchmark::DoNotOptimize(spike_detect_sdp(a, 1, model.kappa, Exponent::infinity(), 1.0, p));
}
BENCHMARK(BM_SpikeDetect)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
