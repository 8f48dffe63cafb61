#include <benchmark/benchmark.h>

#include <algorithm>

#include "boson_chaos/dynamics.hpp"
#include "boson_chaos/ensemble.hpp"
#include "boson_chaos/fock_basis.hpp"
#include "boson_chaos/hamiltonian.hpp"
#include "boson_chaos/spectral_stats.hpp"

namespace bc = boson_chaos;

static void BM_BasisBuild(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bc::BasisTable::build(n, n));
  state.SetLabel("dim " + std::to_string(bc::composition_count(n, n)));
}
BENCHMARK(BM_BasisBuild)->Arg(7)->Arg(8)->Arg(9)->Unit(benchmark::kMillisecond);

static void BM_Assemble(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto table = bc::BasisTable::build(n, n);
  const auto params = bc::ModelParams::standard(n, n, 0.6, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(bc::assemble(params, table));
}
BENCHMARK(BM_Assemble)->Arg(7)->Arg(8)->Arg(9)->Unit(benchmark::kMillisecond);

static void BM_RankLookup(benchmark::State& state) {
  const auto table = bc::BasisTable::build(8, 8);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.rank(table[k]));
    k = (k + 977) % table.size();
  }
}
BENCHMARK(BM_RankLookup);

// dense solvers at the smallest production size
static void BM_Diagonalize(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto table = bc::BasisTable::build(n, n);
  const auto h = bc::assemble(bc::ModelParams::standard(n, n, 0.6, 1.0), table);
  bc::pin_blas_threads();
  for (auto _ : state) benchmark::DoNotOptimize(bc::diagonalize(h));
}
BENCHMARK(BM_Diagonalize)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond)->Iterations(2);

static void BM_EigenvaluesOnly(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto table = bc::BasisTable::build(n, n);
  const auto h = bc::assemble(bc::ModelParams::standard(n, n, 0.6, 1.0), table);
  bc::pin_blas_threads();
  for (auto _ : state) benchmark::DoNotOptimize(bc::eigenvalues_only(h));
}
BENCHMARK(BM_EigenvaluesOnly)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond)->Iterations(2);

static void BM_DiagonalizeProjected(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto table = bc::BasisTable::build(n, n);
  const auto h = bc::assemble(bc::ModelParams::standard(n, n, 0.6, 1.0), table);
  const std::size_t picks[] = {*table.mott_index(), 0};
  bc::pin_blas_threads();
  for (auto _ : state) benchmark::DoNotOptimize(bc::diagonalize_projected(h, picks));
}
BENCHMARK(BM_DiagonalizeProjected)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond)->Iterations(2);

static void BM_SurvivalProbability(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  std::vector<double> w(dim, 1.0 / static_cast<double>(dim)), e(dim);
  for (std::size_t i = 0; i < dim; ++i) e[i] = 0.01 * static_cast<double>(i);
  const auto grid = bc::TimeGrid::logarithmic();
  for (auto _ : state) benchmark::DoNotOptimize(bc::survival_probability(w, e, grid.points));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * dim * grid.size()));
}
BENCHMARK(BM_SurvivalProbability)->Arg(1716)->Arg(6435)->Unit(benchmark::kMillisecond);

static void BM_SpacingRatios(benchmark::State& state) {
  std::vector<double> e(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<double>(i) + 0.3 * ((i * 7919) % 13);
  std::sort(e.begin(), e.end());
  for (auto _ : state) benchmark::DoNotOptimize(bc::mean_ratio_trimmed(e));
}
BENCHMARK(BM_SpacingRatios)->Arg(6435)->Arg(24310);

int main(int argc, char** argv) {
  bc::relaunch_with_fallback_blas(argv);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
