// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "tnt/experiments.hpp"
#include "tnt/kernels.hpp"
#include "tnt/ternary.hpp"

namespace {

std::vector<double> payload(std::size_t n) {
  return tnt::gen_vector(tnt::Distribution::StandardNormal, n, 42);
}

void BM_QuantizeLayerSerial(benchmark::State& state) {
  const tnt::VectorGeometry g{static_cast<std::size_t>(state.range(0)), 576};
  const auto values = payload(g.count * g.length);
  for (auto _ : state) {
    auto out = tnt::quantize_vectors_serial(values, g, tnt::QuantMode::Ternary,
                                            tnt::ScalarKind::Dual);
    benchmark::DoNotOptimize(out.codes.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.count * g.length));
}

void BM_QuantizeLayerParallel(benchmark::State& state) {
  const tnt::VectorGeometry g{static_cast<std::size_t>(state.range(0)), 576};
  const int threads = static_cast<int>(state.range(1));
  const auto values = payload(g.count * g.length);
  for (auto _ : state) {
    auto out = tnt::quantize_vectors_parallel(values, g, tnt::QuantMode::Ternary,
                                              tnt::ScalarKind::Dual, threads);
    benchmark::DoNotOptimize(out.codes.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.count * g.length));
}

void BM_Ternarize(benchmark::State& state) {
  const auto w = payload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto r = tnt::ternarize(w);
    benchmark::DoNotOptimize(r.cosine);
  }
  state.SetComplexityN(state.range(0));
}

void BM_SweepSerial(benchmark::State& state) {
  const std::vector<std::size_t> dims = {10, 100, 1000};
  for (auto _ : state) {
    auto r = tnt::dimension_sweep_serial(tnt::Distribution::UniformSymmetric,
                                         tnt::QuantMode::Ternary, dims, 100, 7);
    benchmark::DoNotOptimize(r.records.data());
  }
}

void BM_SweepParallel(benchmark::State& state) {
  const std::vector<std::size_t> dims = {10, 100, 1000};
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = tnt::dimension_sweep_parallel(tnt::Distribution::UniformSymmetric,
                                           tnt::QuantMode::Ternary, dims, 100, 7, threads);
    benchmark::DoNotOptimize(r.records.data());
  }
}

}  // namespace

BENCHMARK(BM_QuantizeLayerSerial)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuantizeLayerParallel)
    ->ArgsProduct({{512, 4096}, {2, 4, 8}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ternarize)->RangeMultiplier(4)->Range(1 << 10, 1 << 20)->Complexity(benchmark::oNLogN);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
