#pragma once

#include <nlohmann/json.hpp>

#include "ocrhmm/knn.hpp"
#include "ocrhmm/naive_bayes.hpp"
#include "ocrhmm/neural.hpp"
#include "ocrhmm/parzen.hpp"

namespace ocrhmm {

/// Versioned JSON documents: {"format": "ocrhmm-<kind>", "version": 1, ...}.
/// Loading throws ArgumentError on a wrong format tag, unknown version or
/// missing field.
inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const LabeledFeatures& data);
LabeledFeatures labeled_features_from_json(const nlohmann::json& doc);

nlohmann::json model_to_json(const KnnModel& model);
nlohmann::json model_to_json(const ParzenModel& model);
nlohmann::json model_to_json(const NaiveBayesModel& model);
nlohmann::json model_to_json(const OaaNetworkModel& model);

KnnModel knn_model_from_json(const nlohmann::json& doc);
ParzenModel parzen_model_from_json(const nlohmann::json& doc);
NaiveBayesModel naive_bayes_model_from_json(const nlohmann::json& doc);
OaaNetworkModel neural_model_from_json(const nlohmann::json& doc);

nlohmann::json emissions_to_json(const EmissionMatrix& m);

}  // namespace ocrhmm
