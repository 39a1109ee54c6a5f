#include <benchmark/benchmark.h>

#include "ocrhmm/distance.hpp"
#include "ocrhmm/knn.hpp"
#include "ocrhmm/rng.hpp"

using namespace ocrhmm;

namespace {

FeatureMatrix random_matrix(std::size_t rows, std::size_t dim, bool binary, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix m{FeatureSet::f, dim, {}, {}};
  m.values.reserve(rows * dim);
  for (std::size_t i = 0; i < rows * dim; ++i) {
    m.values.push_back(binary ? static_cast<double>(rng.index(2)) : rng.uniform());
  }
  return m;
}

void BM_SquaredDistances(benchmark::State& state) {
  const bool binary = state.range(1) != 0;
  const auto ref = random_matrix(static_cast<std::size_t>(state.range(0)), 128, binary, 1);
  const auto query = random_matrix(64, 128, binary, 2);
  const DistanceEngine engine(ref, query);
  std::vector<double> out(ref.rows());
  for (auto _ : state) {
    for (std::size_t q = 0; q < query.rows(); ++q) {
      engine.squared_distances(q, out);
      benchmark::DoNotOptimize(out.data());
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(query.rows() * ref.rows()));
}
BENCHMARK(BM_SquaredDistances)->Args({4096, 1})->Args({4096, 0})->Args({17000, 1});

void BM_NearestNeighbors(benchmark::State& state) {
  const auto ref = random_matrix(4096, 128, true, 3);
  const auto query = random_matrix(256, 128, true, 4);
  for (auto _ : state) {
    auto nn = nearest_neighbors(ref, query, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(nn.data());
  }
}
BENCHMARK(BM_NearestNeighbors)->Arg(1)->Arg(18);

}  // namespace
