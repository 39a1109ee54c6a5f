#include "ocrhmm/neural.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <string>

#include "ocrhmm/log.hpp"
#include "ocrhmm/rng.hpp"

namespace ocrhmm {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double BinaryNetwork::output(std::span<const double> x) const {
  const double* w1 = params.data();
  const double* b1 = w1 + hidden * inputs;
  const double* w2 = b1 + hidden;
  const double b2 = w2[hidden];
  double z = b2;
  for (std::size_t h = 0; h < hidden; ++h) {
    double a = b1[h];
    for (std::size_t i = 0; i < inputs; ++i) a += w1[h * inputs + i] * x[i];
    z += w2[h] * std::tanh(a);
  }
  return logistic(z);
}

double network_mse(std::size_t inputs, std::size_t hidden, std::span<const double> params,
                   const FeatureMatrix& x, std::span<const double> targets,
                   std::span<double> grad) {
  if (x.dim != inputs) throw ArgumentError("network input dimension mismatch");
  if (params.size() != BinaryNetwork::parameter_count(inputs, hidden)) {
    throw ArgumentError("network parameter count mismatch");
  }
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto d = static_cast<Eigen::Index>(inputs);
  const auto h = static_cast<Eigen::Index>(hidden);
  if (n == 0) {
    std::fill(grad.begin(), grad.end(), 0.0);
    return 0.0;
  }

  const ConstRowMap X(x.values.data(), n, d);
  const ConstRowMap W1(params.data(), h, d);
  const ConstVecMap b1(params.data() + h * d, h);
  const ConstVecMap w2(params.data() + h * d + h, h);
  const double b2 = params[static_cast<std::size_t>(h * d + 2 * h)];
  const ConstVecMap t(targets.data(), n);

  RowMatrix hidden_act = X * W1.transpose();
  hidden_act.rowwise() += b1.transpose();
  hidden_act = hidden_act.array().tanh();
  Eigen::VectorXd z = hidden_act * w2;
  z.array() += b2;
  const Eigen::VectorXd y = z.unaryExpr([](double v) { return logistic(v); });
  const Eigen::VectorXd err = y - t;
  const double loss = err.squaredNorm() / static_cast<double>(n);
  if (grad.empty()) return loss;

  const Eigen::VectorXd delta_out =
      (2.0 / static_cast<double>(n)) * err.array() * y.array() * (1.0 - y.array());
  RowMatrix delta_hidden = delta_out * w2.transpose();
  delta_hidden.array() *= 1.0 - hidden_act.array().square();

  Eigen::Map<RowMatrix> gW1(grad.data(), h, d);
  Eigen::Map<Eigen::VectorXd> gb1(grad.data() + h * d, h);
  Eigen::Map<Eigen::VectorXd> gw2(grad.data() + h * d + h, h);
  gW1.noalias() = delta_hidden.transpose() * X;
  gb1 = delta_hidden.colwise().sum().transpose();
  gw2.noalias() = hidden_act.transpose() * delta_out;
  grad[static_cast<std::size_t>(h * d + 2 * h)] = delta_out.sum();
  return loss;
}

std::vector<double> initial_network_weights(std::size_t inputs, std::size_t hidden,
                                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> p(BinaryNetwork::parameter_count(inputs, hidden));
  const double r1 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(inputs, 1)));
  const double r2 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(hidden, 1)));
  const std::size_t first_layer = hidden * inputs + hidden;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = i < first_layer ? r1 : r2;
    p[i] = rng.uniform(-r, r);
  }
  return p;
}

FeatureMatrix OaaNetworkModel::scale(const FeatureMatrix& m) const {
  if (m.dim != input_min.size()) throw ArgumentError("network input dimension mismatch");
  FeatureMatrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < out.dim; ++j) {
      row[j] = input_range[j] > 0.0 ? 2.0 * (row[j] - input_min[j]) / input_range[j] - 1.0 : 0.0;
    }
  }
  return out;
}

OaaNetworkModel train_neural_oaa(const LabeledFeatures& train, const LabeledFeatures& validation,
                                 std::size_t hidden_nodes, const NeuralConfig& config) {
  if (hidden_nodes < 1) throw ArgumentError("hidden_nodes must be >= 1");
  if (train.size() == 0) throw ArgumentError("network training set is empty");
  const std::size_t d = train.features.dim;

  OaaNetworkModel model;
  model.hidden_nodes = hidden_nodes;
  model.input_min.assign(d, 0.0);
  model.input_range.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double lo = train.features.values[j];
    double hi = lo;
    for (std::size_t i = 1; i < train.size(); ++i) {
      lo = std::min(lo, train.features.values[i * d + j]);
      hi = std::max(hi, train.features.values[i * d + j]);
    }
    model.input_min[j] = lo;
    model.input_range[j] = hi - lo;
  }
  const FeatureMatrix x_train = model.scale(train.features);
  const bool has_validation = validation.size() > 0;
  const FeatureMatrix x_val = has_validation ? model.scale(validation.features) : FeatureMatrix{};

  const Rng master(config.seed);
  std::vector<double> t_train(train.size()), t_val(validation.size());
  for (int c = 0; c < kNumLetters; ++c) {
    for (std::size_t i = 0; i < train.size(); ++i) t_train[i] = train.labels[i] == c ? 1.0 : 0.0;
    for (std::size_t i = 0; i < validation.size(); ++i) {
      t_val[i] = validation.labels[i] == c ? 1.0 : 0.0;
    }
    const Objective objective = [&](std::span<const double> w, std::span<double> g) {
      return network_mse(d, hidden_nodes, w, x_train, t_train, g);
    };
    const Monitor monitor = [&](std::span<const double> w) {
      return network_mse(d, hidden_nodes, w, x_val, t_val, {});
    };

    BinaryNetwork net{d, hidden_nodes, {}};
    ScgResult result;
    for (int attempt = 0;; ++attempt) {
      net.params = initial_network_weights(
          d, hidden_nodes, master.derive(static_cast<std::uint64_t>(c * 2 + attempt)));
      try {
        result = scg_minimize(objective, net.params, config.scg, has_validation ? &monitor : nullptr);
        break;
      } catch (const ModelError& e) {
        if (attempt == 1) {
          throw ModelError(std::string("network for letter '") + letter_char(c) +
                           "' failed twice: " + e.what());
        }
        log::warn(std::string("network for letter '") + letter_char(c) +
                  "' diverged; reinitialising");
      }
    }
    model.networks.push_back(std::move(net));
    model.epochs.push_back(result.epochs);
  }
  model.mean_epochs = std::accumulate(model.epochs.begin(), model.epochs.end(), 0.0) /
                      static_cast<double>(model.epochs.size());
  return model;
}

ClassifierOutput nn_classify(const OaaNetworkModel& model, const FeatureMatrix& test) {
  const FeatureMatrix x = model.scale(test);
  ClassifierOutput out;
  out.raw = LetterMatrix(x.rows());
  for (int c = 0; c < kNumLetters; ++c) {
    const BinaryNetwork& net = model.networks[static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < x.rows(); ++j) out.raw(c, j) = net.output(x.row(j));
  }
  out.emissions = normalize_emissions(out.raw);
  out.predicted = classify_argmax(out.raw);
  return out;
}

EmissionMatrix nn_emissions(const OaaNetworkModel& model, const FeatureMatrix& test) {
  return nn_classify(model, test).emissions;
}

}  // namespace ocrhmm
