#include <benchmark/benchmark.h>

#include <cmath>

#include "ocrhmm/hmm.hpp"
#include "ocrhmm/rng.hpp"

using namespace ocrhmm;

namespace {

HmmModel dense_model(Rng& rng) {
  HmmModel m;
  TransitionMatrix last{};
  for (int i = 0; i < kNumLetters; ++i) {
    m.initial[static_cast<std::size_t>(i)] = rng.uniform();
    m.final_dist[static_cast<std::size_t>(i)] = rng.uniform();
    for (int j = 0; j < kNumLetters; ++j) {
      m.transition[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rng.uniform();
      last[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rng.uniform();
    }
  }
  m.final_transition = last;
  return m;
}

void BM_ViterbiDecode(benchmark::State& state) {
  Rng rng(1);
  const HmmModel model = dense_model(rng);
  WordEmissions e;
  e.length = static_cast<std::size_t>(state.range(0));
  for (std::size_t k = 0; k < e.length * kNumLetters; ++k) e.log_values.push_back(std::log(rng.uniform()));
  const auto mode = static_cast<DecodeMode>(state.range(1));
  for (auto _ : state) {
    auto d = viterbi_decode(model, e, mode);
    benchmark::DoNotOptimize(d.letters.data());
  }
}
BENCHMARK(BM_ViterbiDecode)->Args({4, 1})->Args({8, 1})->Args({14, 1})->Args({8, 2})->Args({8, 3});

void BM_EstimateHmm(benchmark::State& state) {
  Rng rng(2);
  std::vector<LetterSequence> words(2300);
  for (auto& w : words) {
    w.resize(2 + rng.index(12));
    for (auto& l : w) l = static_cast<Letter>(rng.index(kNumLetters));
  }
  for (auto _ : state) {
    auto m = estimate_hmm(words);
    benchmark::DoNotOptimize(&m);
  }
}
BENCHMARK(BM_EstimateHmm);

}  // namespace
