#include <benchmark/benchmark.h>

#include "ocrhmm/features.hpp"
#include "ocrhmm/imageops.hpp"
#include "synthetic.hpp"

using namespace ocrhmm;

namespace {

void BM_EllipseStats(benchmark::State& state) {
  Rng rng(1);
  const Bitmap b = test_support::random_bitmap(rng, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(ellipse_stats(b));
}
BENCHMARK(BM_EllipseStats);

void BM_RegionStats(benchmark::State& state) {
  Rng rng(2);
  const Bitmap b = test_support::random_bitmap(rng, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(region_stats(b));
}
BENCHMARK(BM_RegionStats);

void BM_RotateUpright(benchmark::State& state) {
  Rng rng(3);
  const Bitmap b = test_support::random_bitmap(rng, 0.4);
  const double angle = ellipse_stats(b).orientation;
  for (auto _ : state) benchmark::DoNotOptimize(rotate_upright(b, angle));
}
BENCHMARK(BM_RotateUpright);

// Cold extraction of set e (all scalar statistics plus deslanted pixels).
void BM_ExtractSetE(benchmark::State& state) {
  const Dataset d = test_support::synthetic_dataset(20);
  for (auto _ : state) {
    FeatureExtractor ex(d.glyphs);
    auto m = ex.extract(FeatureSet::e);
    benchmark::DoNotOptimize(m.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.glyphs.size()));
}
BENCHMARK(BM_ExtractSetE);

}  // namespace

BENCHMARK_MAIN();
