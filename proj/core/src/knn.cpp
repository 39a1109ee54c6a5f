#include "ocrhmm/knn.hpp"

#include <algorithm>
#include <array>

#include "ocrhmm/distance.hpp"
#include "ocrhmm/log.hpp"

namespace ocrhmm {

int select_k(const std::function<double(int)>& error_at, int max_k, int patience,
             std::vector<std::pair<int, double>>* trace) {
  if (max_k < 1) throw ArgumentError("max_k must be >= 1");
  int best_k = max_k;
  double best_error = 0.0;
  double previous = 0.0;
  int increases = 0;
  for (int k = max_k; k >= 1; --k) {
    const double err = error_at(k);
    if (trace) trace->emplace_back(k, err);
    if (k == max_k || err <= best_error) {
      best_k = k;
      best_error = err;
    }
    if (k != max_k && err > previous && ++increases >= patience) break;
    previous = err;
  }
  return best_k;
}

std::vector<std::vector<std::size_t>> nearest_neighbors(const FeatureMatrix& reference,
                                                        const FeatureMatrix& queries,
                                                        std::size_t k, bool exclude_self) {
  const DistanceEngine engine(reference, queries);
  if (exclude_self && engine.query_size() != engine.reference_size()) {
    throw ArgumentError("leave-one-out search needs the reference rows as queries");
  }
  k = std::min(k, engine.reference_size() - (exclude_self ? 1 : 0));
  std::vector<std::vector<std::size_t>> out(engine.query_size());
  std::vector<double> dist(engine.reference_size());
  std::vector<std::pair<double, std::size_t>> best;
  best.reserve(k + 1);
  for (std::size_t q = 0; q < engine.query_size(); ++q) {
    engine.squared_distances(q, dist);
    best.clear();
    for (std::size_t j = 0; j < dist.size(); ++j) {
      if (exclude_self && j == q) continue;
      const double d = dist[j];
      if (best.size() == k && !(d < best.back().first)) continue;
      // Insert after every entry with distance <= d, so equal distances keep
      // reference order.
      auto pos = std::upper_bound(best.begin(), best.end(), d,
                                  [](double value, const auto& e) { return value < e.first; });
      best.insert(pos, {d, j});
      if (best.size() > k) best.pop_back();
    }
    out[q].reserve(best.size());
    for (const auto& e : best) out[q].push_back(e.second);
  }
  return out;
}

Letter neighbor_mode(std::span<const std::size_t> neighbors, std::span<const Letter> labels,
                     std::size_t k) {
  std::array<int, kNumLetters> counts{};
  for (std::size_t i = 0; i < std::min(k, neighbors.size()); ++i) ++counts[labels[neighbors[i]]];
  int best = 0;
  for (int r = 1; r < kNumLetters; ++r) {
    if (counts[static_cast<std::size_t>(r)] > counts[static_cast<std::size_t>(best)]) best = r;
  }
  return static_cast<Letter>(best);
}

KnnModel train_knn(const LabeledFeatures& train, const LabeledFeatures& validation,
                   const KnnSearchConfig& config) {
  if (train.size() == 0) throw ArgumentError("kNN needs a nonempty training set");
  KnnModel model;
  model.train = train;
  if (validation.size() == 0) {
    log::warn("kNN validation set is empty; using k = 1");
    model.k = 1;
    return model;
  }
  const int max_k = std::min<int>(config.max_k, static_cast<int>(train.size()));
  const auto neighbors =
      nearest_neighbors(train.features, validation.features, static_cast<std::size_t>(max_k));

  auto error_at = [&](int k) {
    std::size_t wrong = 0;
    for (std::size_t q = 0; q < neighbors.size(); ++q) {
      if (neighbor_mode(neighbors[q], train.labels, static_cast<std::size_t>(k)) !=
          validation.labels[q]) {
        ++wrong;
      }
    }
    return static_cast<double>(wrong) / static_cast<double>(neighbors.size());
  };
  model.k = select_k(error_at, max_k, config.patience, &model.search_trace);
  return model;
}

namespace {

ClassifierOutput vote(const KnnModel& model, const std::vector<std::vector<std::size_t>>& neighbors) {
  ClassifierOutput out;
  out.raw = LetterMatrix(neighbors.size());
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    for (std::size_t idx : neighbors[j]) out.raw(model.train.labels[idx], j) += 1.0;
    const auto used = static_cast<double>(neighbors[j].size());
    for (int r = 0; r < kNumLetters; ++r) out.raw(r, j) /= used;
  }
  out.emissions = normalize_emissions(out.raw);
  out.predicted = classify_argmax(out.raw);
  return out;
}

}  // namespace

ClassifierOutput knn_classify(const KnnModel& model, const FeatureMatrix& test) {
  if (test.dim != model.train.features.dim) {
    throw ArgumentError("kNN test dimension " + std::to_string(test.dim) + " != model dimension " +
                        std::to_string(model.train.features.dim));
  }
  return vote(model, nearest_neighbors(model.train.features, test,
                                       static_cast<std::size_t>(model.k)));
}

ClassifierOutput knn_classify_leave_one_out(const KnnModel& model) {
  return vote(model, nearest_neighbors(model.train.features, model.train.features,
                                       static_cast<std::size_t>(model.k), true));
}

EmissionMatrix knn_emissions(const KnnModel& model, const FeatureMatrix& test) {
  return knn_classify(model, test).emissions;
}

}  // namespace ocrhmm
