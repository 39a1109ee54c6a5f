#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ocrhmm/emission.hpp"

namespace ocrhmm {

struct KnnSearchConfig {
  int max_k = 18;
  int patience = 6;  ///< stop after this many error increases
};

struct KnnModel {
  int k = 1;
  LabeledFeatures train;
  /// (k, validation error) in evaluation order; empty when k was not searched.
  std::vector<std::pair<int, double>> search_trace;
};

/// Walks k = max_k, max_k-1, ..., 1, calling `error_at(k)`; stops once the
/// error has gone up relative to the previous k `patience` times. Returns
/// the k of minimum error (smallest k on ties) and appends to `trace`.
int select_k(const std::function<double(int)>& error_at, int max_k, int patience,
             std::vector<std::pair<int, double>>* trace = nullptr);

/// For each query row, the indices of its `k` nearest reference rows by
/// Euclidean distance, ordered by (distance, reference index). With
/// `exclude_self` the queries are the reference rows and query q never
/// lists reference q (leave-one-out).
std::vector<std::vector<std::size_t>> nearest_neighbors(const FeatureMatrix& reference,
                                                        const FeatureMatrix& queries,
                                                        std::size_t k, bool exclude_self = false);

/// Majority letter among the first k neighbours (lower letter on ties).
Letter neighbor_mode(std::span<const std::size_t> neighbors, std::span<const Letter> labels,
                     std::size_t k);

/// Chooses k on the validation set. An empty validation set falls back to
/// k = 1 with a warning. Throws ArgumentError on an empty training set.
KnnModel train_knn(const LabeledFeatures& train, const LabeledFeatures& validation,
                   const KnnSearchConfig& config = {});

/// raw column j = neighbour letter counts / k; emissions are the row-normalized raw.
ClassifierOutput knn_classify(const KnnModel& model, const FeatureMatrix& test);

/// knn_classify on the model's own training rows, each without itself.
ClassifierOutput knn_classify_leave_one_out(const KnnModel& model);

EmissionMatrix knn_emissions(const KnnModel& model, const FeatureMatrix& test);

}  // namespace ocrhmm
