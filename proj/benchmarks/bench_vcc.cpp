#include <benchmark/benchmark.h>

#include <random>

#include "peaktag/matching.hpp"
#include "peaktag/panorama.hpp"
#include "peaktag/peaks.hpp"

namespace {

using namespace peaktag;

EdgeMap random_edges(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EdgeMap e(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (unit(rng) < 0.05) e.set(x, y, unit(rng), unit(rng) * 6.283185307179586);
    }
  }
  return e;
}

void BM_VccFft(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const EdgeMap pano = random_edges(360 * q, 20 * q, 1);
  const EdgeMap photo = random_edges(40 * q, 15 * q, 2);
  for (auto _ : state) benchmark::DoNotOptimize(compute_vcc_grid(photo, pano));
}
BENCHMARK(BM_VccFft)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_VccBruteForce(benchmark::State& state) {
  const EdgeMap pano = random_edges(256, 64, 3);
  const EdgeMap photo = random_edges(static_cast<int>(state.range(0)), 32, 4);
  for (auto _ : state) benchmark::DoNotOptimize(vcc_brute_force(photo, pano));
}
BENCHMARK(BM_VccBruteForce)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_RefinePeak(benchmark::State& state) {
  const EdgeMap pano = random_edges(7200, 400, 5);
  const EdgeMap photo = random_edges(800, 300, 6);
  const Peak peak{"p", 3400.0, 150.0};
  Alignment a;
  a.dx = 3000;
  a.dy = 50;
  for (auto _ : state) benchmark::DoNotOptimize(refine_peak(photo, pano, peak, a, {}));
}
BENCHMARK(BM_RefinePeak)->Unit(benchmark::kMillisecond);

void BM_SyntheticCase(benchmark::State& state) {
  SynthConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_synthetic_case(cfg));
    ++cfg.seed;
  }
}
BENCHMARK(BM_SyntheticCase)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
