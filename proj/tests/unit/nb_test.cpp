#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "ocrhmm/naive_bayes.hpp"
#include "ocrhmm/rng.hpp"

using namespace ocrhmm;

namespace {

// Every letter present: a copies of the per-letter values.
LabeledFeatures all_letters(std::size_t dim, const std::function<double(int, std::size_t, int)>& value,
                            int per_letter = 3) {
  LabeledFeatures out;
  out.features.dim = dim;
  for (int c = 0; c < kNumLetters; ++c) {
    for (int i = 0; i < per_letter + (c == 0 ? 3 : 0); ++i) {
      for (std::size_t f = 0; f < dim; ++f) out.features.values.push_back(value(c, f, i));
      out.labels.push_back(static_cast<Letter>(c));
    }
  }
  return out;
}

double direct_kde(std::span<const double> samples, double h, double x) {
  double s = 0.0;
  for (double v : samples) s += std::exp(-0.5 * (x - v) * (x - v) / (h * h));
  return s / (static_cast<double>(samples.size()) * h * std::sqrt(2 * std::numbers::pi));
}

// Same sum through log-sum-exp over every sample, for far-away points.
double direct_log_kde(std::span<const double> samples, double h, double x) {
  std::vector<double> terms;
  for (double v : samples) terms.push_back(-0.5 * (x - v) * (x - v) / (h * h));
  const double peak = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - peak);
  return peak + std::log(s) - std::log(static_cast<double>(samples.size()) * h * std::sqrt(2 * std::numbers::pi));
}

}  // namespace

TEST(RuleOfThumb, Formula) {
  const std::vector<double> s{1, 2, 3, 4};
  const double sd = std::sqrt(5.0 / 3.0);
  EXPECT_NEAR(rule_of_thumb_bandwidth(s, 1e-3), sd * std::pow(4.0 / 12.0, 0.2), 1e-12);
  const std::vector<double> flat{2, 2, 2};
  EXPECT_EQ(rule_of_thumb_bandwidth(flat, 1e-3), 1e-3);
}

TEST(KernelDensity1D, MatchesDirectSum) {
  Rng rng(5);
  std::vector<double> samples;
  for (int i = 0; i < 50; ++i) samples.push_back(std::round(rng.uniform(0, 10)));  // repeats
  const KernelDensity1D k = KernelDensity1D::fit(samples, 1e-3);
  EXPECT_LT(k.values.size(), samples.size());
  for (double x : {-3.0, 0.0, 2.5, 7.1, 12.0}) {
    EXPECT_NEAR(k.density(x), direct_kde(samples, k.bandwidth, x), 1e-12 * std::max(1.0, k.density(x)));
  }
  EXPECT_NEAR(k.log_density(200.0), direct_log_kde(samples, k.bandwidth, 200.0), 1e-9 * 7500);
}

TEST(TrainNaiveBayes, MissingLetterIsNamed) {
  LabeledFeatures t = all_letters(1, [](int c, std::size_t, int) { return c; });
  // drop every 'q'
  LabeledFeatures cut;
  cut.features.dim = 1;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.labels[i] == letter_from_char('q')) continue;
    cut.features.values.push_back(t.features.values[i]);
    cut.labels.push_back(t.labels[i]);
  }
  try {
    train_naive_bayes(cut);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("'q'"), std::string::npos);
  }
}

TEST(NbClassify, UninformativeFeatureGivesPriors) {
  const LabeledFeatures t = all_letters(1, [](int, std::size_t, int) { return 4.0; });
  const NaiveBayesModel m = train_naive_bayes(t);
  FeatureMatrix q{FeatureSet::a, 1, {4.0, 0.0, 17.0}, {}};
  const ClassifierOutput out = nb_classify(m, q);
  for (std::size_t j = 0; j < 3; ++j) {
    for (int c = 0; c < kNumLetters; ++c) EXPECT_NEAR(out.raw(c, j), m.priors[static_cast<std::size_t>(c)], 1e-12);
  }
  EXPECT_EQ(out.predicted[0], 0);  // 'a' has the largest prior
}

TEST(NbLogLikelihoods, TwoValueClassesClosedForm) {
  // a at {0, 0}, b at {1, 1}: zero spread, so the floor bandwidth applies
  const LabeledFeatures t = all_letters(1, [](int c, std::size_t, int) { return c == 1 ? 1.0 : (c == 0 ? 0.0 : 5.0 + c); }, 2);
  const NaiveBayesModel m = train_naive_bayes(t, {.bandwidth_floor = 1e-3});
  EXPECT_EQ(m.density(0, 0).bandwidth, 1e-3);
  FeatureMatrix q{FeatureSet::a, 1, {0.0}, {}};
  const LetterMatrix ll = nb_log_likelihoods(m, q);
  const double h = 1e-3;
  EXPECT_NEAR(ll(0, 0), -std::log(h) - 0.5 * std::log(2 * std::numbers::pi), 1e-9);
  EXPECT_NEAR(ll(0, 0) - ll(1, 0), 0.5 / (h * h), 1e-4);
  EXPECT_EQ(nb_classify(m, q).predicted[0], 0);
}

TEST(NbLogLikelihoods, SumOfPerFeatureLogs) {
  Rng rng(9);
  const LabeledFeatures t = all_letters(2, [&](int c, std::size_t f, int) { return c + rng.uniform(0, 2.0 + f); }, 6);
  const NaiveBayesModel m = train_naive_bayes(t);
  FeatureMatrix q{FeatureSet::a, 2, {}, {}};
  for (int i = 0; i < 10; ++i) {
    q.values.push_back(rng.uniform(0, 27));
    q.values.push_back(rng.uniform(0, 27));
  }
  const LetterMatrix ll = nb_log_likelihoods(m, q);
  for (int c = 0; c < kNumLetters; ++c) {
    std::array<std::vector<double>, 2> cls;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.labels[i] != c) continue;
      cls[0].push_back(t.features.row(i)[0]);
      cls[1].push_back(t.features.row(i)[1]);
    }
    for (std::size_t j = 0; j < 10; ++j) {
      const double p0 = direct_kde(cls[0], m.density(c, 0).bandwidth, q.row(j)[0]);
      const double p1 = direct_kde(cls[1], m.density(c, 1).bandwidth, q.row(j)[1]);
      if (p0 * p1 > 1e-250) EXPECT_NEAR(ll(c, j), std::log(p0 * p1), 1e-9);
    }
  }
}

TEST(NbClassify, UniformPriorsPosteriorArgmaxEqualsLikelihoodArgmax) {
  Rng rng(2);
  LabeledFeatures t = all_letters(3, [&](int c, std::size_t, int) { return c * 0.3 + rng.uniform(); }, 4);
  // equalise the class counts
  LabeledFeatures even;
  even.features.dim = 3;
  std::array<int, kNumLetters> seen{};
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (seen[t.labels[i]]++ >= 4) continue;
    even.features.values.insert(even.features.values.end(), t.features.row(i).begin(), t.features.row(i).end());
    even.labels.push_back(t.labels[i]);
  }
  const NaiveBayesModel m = train_naive_bayes(even);
  FeatureMatrix q{FeatureSet::a, 3, {}, {}};
  for (int i = 0; i < 60; ++i) q.values.push_back(rng.uniform(0, 9));
  const LetterMatrix ll = nb_log_likelihoods(m, q);
  const ClassifierOutput out = nb_classify(m, q);
  EXPECT_EQ(out.predicted, classify_argmax(ll));
}

TEST(NbEmissions, ColumnShiftThenRowNormalize) {
  const LabeledFeatures t = all_letters(1, [](int c, std::size_t, int i) { return c + 0.1 * i; });
  const NaiveBayesModel m = train_naive_bayes(t);
  FeatureMatrix q{FeatureSet::a, 1, {3.05, 3.2, 7.9, 40.0}, {}};
  const LetterMatrix ll = nb_log_likelihoods(m, q);
  LetterMatrix expected(4);
  for (std::size_t j = 0; j < 4; ++j) {
    double peak = -INFINITY;
    for (int c = 0; c < kNumLetters; ++c) peak = std::max(peak, ll(c, j));
    for (int c = 0; c < kNumLetters; ++c) expected(c, j) = std::exp(ll(c, j) - peak);
  }
  const EmissionMatrix e = nb_emissions(m, q);
  for (int c = 0; c < kNumLetters; ++c) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 4; ++j) sum += expected(c, j);
    // a row with no mass anywhere stays zero
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(e(c, j), sum > 0 ? expected(c, j) / sum : 0.0, 1e-12);
  }
  // letter 'd' wins both of its nearby samples outright
  EXPECT_NEAR(e(3, 0), 0.5, 1e-9);
  EXPECT_NEAR(e(3, 1), 0.5, 1e-9);
}
