#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ocrhmm/emission.hpp"
#include "ocrhmm/scg.hpp"

namespace ocrhmm {

/// inputs -> tanh hidden layer -> one logistic output.
/// Parameter layout: hidden x inputs weights (row-major), hidden biases,
/// hidden output weights, output bias.
struct BinaryNetwork {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> params;

  static std::size_t parameter_count(std::size_t inputs, std::size_t hidden) {
    return hidden * inputs + 2 * hidden + 1;
  }
  double output(std::span<const double> x) const;
};

/// Mean squared error of a network over (x, targets) and its gradient.
/// `grad` may be empty to skip the backward pass.
double network_mse(std::size_t inputs, std::size_t hidden, std::span<const double> params,
                   const FeatureMatrix& x, std::span<const double> targets,
                   std::span<double> grad);

/// Uniform in +-1/sqrt(fan-in), per layer.
std::vector<double> initial_network_weights(std::size_t inputs, std::size_t hidden,
                                            std::uint64_t seed);

struct NeuralConfig {
  ScgConfig scg;
  std::uint64_t seed = 1;
};

/// 26 one-vs-all networks sharing a min-max input scaling onto [-1, 1].
struct OaaNetworkModel {
  std::size_t hidden_nodes = 0;
  std::vector<double> input_min;
  std::vector<double> input_range;  ///< zero for constant features
  std::vector<BinaryNetwork> networks;
  std::vector<int> epochs;
  double mean_epochs = 0.0;

  /// Applies the stored input scaling.
  FeatureMatrix scale(const FeatureMatrix& m) const;
};

/// Trains network c on targets 1 for letter c and 0 otherwise, with early
/// stopping on the validation split. A network whose loss turns non-finite
/// is reinitialised once; a second failure throws ModelError.
OaaNetworkModel train_neural_oaa(const LabeledFeatures& train, const LabeledFeatures& validation,
                                 std::size_t hidden_nodes, const NeuralConfig& config = {});

/// raw row c = network c output per sample; emissions row-normalized.
ClassifierOutput nn_classify(const OaaNetworkModel& model, const FeatureMatrix& test);

EmissionMatrix nn_emissions(const OaaNetworkModel& model, const FeatureMatrix& test);

}  // namespace ocrhmm
