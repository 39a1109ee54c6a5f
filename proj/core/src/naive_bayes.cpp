#include "ocrhmm/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ocrhmm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

double rule_of_thumb_bandwidth(std::span<const double> samples, double floor) {
  const auto n = static_cast<double>(samples.size());
  if (samples.size() < 2) return floor;
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / (n - 1.0));
  return std::max(floor, sigma * std::pow(4.0 / (3.0 * n), 0.2));
}

KernelDensity1D KernelDensity1D::fit(std::span<const double> samples, double bandwidth_floor) {
  KernelDensity1D k;
  k.bandwidth = rule_of_thumb_bandwidth(samples, bandwidth_floor);
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  for (double v : sorted) {
    if (k.values.empty() || k.values.back() != v) {
      k.values.push_back(v);
      k.weights.push_back(0.0);
    }
    k.weights.back() += 1.0;
  }
  k.total = static_cast<double>(samples.size());
  return k;
}

double KernelDensity1D::log_density(double x) const {
  if (values.empty()) return kNegInf;
  // The closest sample gives the largest kernel term; shift by it.
  auto it = std::lower_bound(values.begin(), values.end(), x);
  double nearest = std::numeric_limits<double>::infinity();
  if (it != values.end()) nearest = std::abs(*it - x);
  if (it != values.begin()) nearest = std::min(nearest, std::abs(*std::prev(it) - x));
  const double inv = 1.0 / bandwidth;
  const double z0 = nearest * inv;
  const double peak = -0.5 * z0 * z0;
  // Terms more than 12 bandwidths beyond the nearest are below e^-72 of it.
  const double radius = nearest + 12.0 * bandwidth;
  const auto first = std::lower_bound(values.begin(), values.end(), x - radius);
  const auto last = std::upper_bound(first, values.end(), x + radius);
  double sum = 0.0;
  for (auto v = first; v != last; ++v) {
    const double z = (x - *v) * inv;
    sum += weights[static_cast<std::size_t>(v - values.begin())] * std::exp(-0.5 * z * z - peak);
  }
  return peak + std::log(sum) - std::log(total) - std::log(bandwidth) - kLogSqrt2Pi;
}

double KernelDensity1D::density(double x) const { return std::exp(log_density(x)); }

NaiveBayesModel train_naive_bayes(const LabeledFeatures& train, const NaiveBayesConfig& config) {
  if (train.size() == 0) throw ArgumentError("naive Bayes needs a nonempty training set");
  NaiveBayesModel model;
  model.dim = train.features.dim;
  model.priors = class_priors(train.labels);
  for (int c = 0; c < kNumLetters; ++c) {
    if (model.priors[static_cast<std::size_t>(c)] == 0.0) {
      throw ModelError(std::string("naive Bayes: letter '") + letter_char(c) +
                       "' has no training sample");
    }
  }
  std::array<std::vector<std::size_t>, kNumLetters> members;
  for (std::size_t i = 0; i < train.size(); ++i) members[train.labels[i]].push_back(i);

  model.densities.resize(static_cast<std::size_t>(kNumLetters) * model.dim);
  std::vector<double> column;
  for (int c = 0; c < kNumLetters; ++c) {
    const auto& rows = members[static_cast<std::size_t>(c)];
    for (std::size_t f = 0; f < model.dim; ++f) {
      column.clear();
      for (std::size_t i : rows) column.push_back(train.features.values[i * model.dim + f]);
      model.densities[static_cast<std::size_t>(c) * model.dim + f] =
          KernelDensity1D::fit(column, config.bandwidth_floor);
    }
  }
  return model;
}

LetterMatrix nb_log_likelihoods(const NaiveBayesModel& model, const FeatureMatrix& test) {
  if (test.dim != model.dim) throw ArgumentError("naive Bayes test dimension mismatch");
  LetterMatrix out(test.rows());
  for (int c = 0; c < kNumLetters; ++c) {
    for (std::size_t j = 0; j < test.rows(); ++j) {
      const auto x = test.row(j);
      double acc = 0.0;
      for (std::size_t f = 0; f < model.dim; ++f) acc += model.density(c, f).log_density(x[f]);
      out(c, j) = acc;
    }
  }
  return out;
}

ClassifierOutput nb_classify(const NaiveBayesModel& model, const FeatureMatrix& test) {
  const LetterMatrix loglik = nb_log_likelihoods(model, test);
  const std::size_t n = loglik.samples();
  ClassifierOutput out;
  out.raw = LetterMatrix(n);
  LetterMatrix shifted(n);
  for (std::size_t j = 0; j < n; ++j) {
    double peak = kNegInf;
    for (int c = 0; c < kNumLetters; ++c) peak = std::max(peak, loglik(c, j));
    // Shift by the likelihood peak first: log likelihoods can sit near -1e7,
    // where adding a log prior directly would lose its low digits.
    std::array<double, kNumLetters> log_post{};
    double post_peak = kNegInf;
    for (int c = 0; c < kNumLetters; ++c) {
      const auto i = static_cast<std::size_t>(c);
      log_post[i] = peak == kNegInf ? kNegInf : (loglik(c, j) - peak) + std::log(model.priors[i]);
      post_peak = std::max(post_peak, log_post[i]);
    }
    double sum = 0.0;
    for (int c = 0; c < kNumLetters; ++c) {
      const auto i = static_cast<std::size_t>(c);
      shifted(c, j) = peak == kNegInf ? 0.0 : std::exp(loglik(c, j) - peak);
      const double post = post_peak == kNegInf ? model.priors[i] : std::exp(log_post[i] - post_peak);
      out.raw(c, j) = post;
      sum += post;
    }
    for (int c = 0; c < kNumLetters; ++c) out.raw(c, j) /= sum;
  }
  out.emissions = normalize_emissions(shifted);
  out.predicted = classify_argmax(out.raw);
  return out;
}

EmissionMatrix nb_emissions(const NaiveBayesModel& model, const FeatureMatrix& test) {
  return nb_classify(model, test).emissions;
}

}  // namespace ocrhmm
