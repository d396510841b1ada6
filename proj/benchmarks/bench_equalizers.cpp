#include <benchmark/benchmark.h>

#include <random>

#include "otfs/channel.hpp"
#include "otfs/equalizers.hpp"
#include "otfs/modem_sim.hpp"
#include "otfs/struct_linalg.hpp"

namespace {

using namespace otfs;

EffectiveChannel make_channel(int m, int n) {
  const DdGrid grid(m, n, 15e3);
  const DelayProfile profile = DelayProfile::vehicular_b_scaled(grid);
  return heff_rect_generators(build_time_domain(draw_realization(profile, 1000.0, 7), profile, grid));
}

void BM_ZfBuild(benchmark::State& state) {
  const EffectiveChannel eff = make_channel(int(state.range(0)), int(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(zf_build(eff, eff.pattern()));
}
BENCHMARK(BM_ZfBuild)->ArgsProduct({{16, 32, 64}, {8, 32}})->Unit(benchmark::kMicrosecond);

void BM_MmseBuild(benchmark::State& state) {
  const EffectiveChannel eff = make_channel(int(state.range(0)), int(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(mmse_build(eff, 0.1, eff.pattern()));
}
BENCHMARK(BM_MmseBuild)->ArgsProduct({{16, 32, 64}, {8, 32}})->Unit(benchmark::kMicrosecond);

void BM_DirectZfBuild(benchmark::State& state) {
  const CMatrix h = make_channel(int(state.range(0)), int(state.range(1))).dense();
  for (auto _ : state) benchmark::DoNotOptimize(direct_zf_build(h));
}
BENCHMARK(BM_DirectZfBuild)->Args({16, 8})->Args({32, 32})->Unit(benchmark::kMillisecond);

void BM_StructuredInvert(benchmark::State& state) {
  const int m = int(state.range(0));
  const DelayPattern pattern({0, 1, 3, 4, 5}, m);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  CMatrix s = CMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    s(i, i) = 4.0;
    for (int k = 1; k < pattern.path_count(); ++k) s(i, pattern.column(i, k)) = Complex(g(rng), g(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(structured_invert(s, pattern));
  state.SetComplexityN(m);
}
BENCHMARK(BM_StructuredInvert)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_EqualizerApply(benchmark::State& state) {
  const EffectiveChannel eff = make_channel(64, 32);
  const ZfEqualizer eq = zf_build(eff, eff.pattern());
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  CVector y(eff.grid().size());
  for (auto& v : y) v = Complex(g(rng), g(rng));
  for (auto _ : state) benchmark::DoNotOptimize(zf_apply(eq, y));
}
BENCHMARK(BM_EqualizerApply)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
