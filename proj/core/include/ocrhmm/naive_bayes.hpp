#pragma once

#include <array>
#include <vector>

#include "ocrhmm/emission.hpp"

namespace ocrhmm {

/// Gaussian-kernel density over one feature's training values, with
/// repeated values folded into weights.
struct KernelDensity1D {
  std::vector<double> values;   ///< distinct, ascending
  std::vector<double> weights;  ///< occurrences per value
  double total = 0.0;
  double bandwidth = 1.0;

  static KernelDensity1D fit(std::span<const double> samples, double bandwidth_floor);
  double log_density(double x) const;
  double density(double x) const;
};

/// Rule-of-thumb bandwidth sigma * (4 / (3 n))^(1/5), floored.
double rule_of_thumb_bandwidth(std::span<const double> samples, double floor);

struct NaiveBayesConfig {
  double bandwidth_floor = 1e-3;
};

struct NaiveBayesModel {
  std::size_t dim = 0;
  std::array<double, kNumLetters> priors{};
  std::vector<KernelDensity1D> densities;  ///< letter-major: [letter * dim + feature]

  const KernelDensity1D& density(int letter, std::size_t feature) const {
    return densities[static_cast<std::size_t>(letter) * dim + feature];
  }
};

/// Throws ModelError naming the first letter with no training sample.
NaiveBayesModel train_naive_bayes(const LabeledFeatures& train,
                                  const NaiveBayesConfig& config = {});

/// log prod_f density_{C,f}(x_f) for every letter and sample.
LetterMatrix nb_log_likelihoods(const NaiveBayesModel& model, const FeatureMatrix& test);

/// raw = posterior P(C | x); emissions = exp(log likelihood - column max),
/// then row-normalized.
ClassifierOutput nb_classify(const NaiveBayesModel& model, const FeatureMatrix& test);

EmissionMatrix nb_emissions(const NaiveBayesModel& model, const FeatureMatrix& test);

}  // namespace ocrhmm
