#include "ocrhmm/parzen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "ocrhmm/distance.hpp"
#include "ocrhmm/log.hpp"

namespace ocrhmm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

BandwidthSearch search_bandwidth(const std::function<double(double)>& error_at, double h_lo,
                                 double h_hi, double relative_width, int max_iterations) {
  if (!(h_lo > 0.0) || !(h_hi > h_lo)) {
    throw ArgumentError("bandwidth bracket must satisfy 0 < h_lo < h_hi");
  }
  BandwidthSearch out;
  auto eval = [&](double h) {
    const double err = error_at(h);
    out.trace.emplace_back(h, err);
    if (out.trace.size() == 1 || err < out.best_error ||
        (err == out.best_error && h > out.best_h)) {
      out.best_h = h;
      out.best_error = err;
    }
    return err;
  };

  const double stop_width = relative_width * h_hi;
  double lo = h_lo;
  double hi = h_hi;
  eval(hi);
  eval(lo);
  double center = 0.5 * (lo + hi);
  double center_err = eval(center);

  while (out.iterations < max_iterations && (hi - lo) >= stop_width) {
    ++out.iterations;
    const double left = 0.5 * (lo + center);
    const double right = 0.5 * (center + hi);
    const double left_err = eval(left);
    const double right_err = eval(right);
    if (left_err < center_err && left_err < right_err) {
      hi = center;
      center = left;
      center_err = left_err;
    } else if (right_err < center_err && right_err <= left_err) {
      lo = center;
      center = right;
      center_err = right_err;
    } else {
      lo = left;
      hi = right;
    }
  }
  out.final_width = hi - lo;
  return out;
}

double largest_feature_range(const FeatureMatrix& m) {
  double widest = 0.0;
  for (std::size_t c = 0; c < m.dim; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      lo = std::min(lo, m.values[i * m.dim + c]);
      hi = std::max(hi, m.values[i * m.dim + c]);
    }
    if (m.rows() > 0) widest = std::max(widest, hi - lo);
  }
  return widest;
}

struct ParzenScorer::Impl {
  Impl(const LabeledFeatures& train, const FeatureMatrix& queries, ParzenKernel k, bool loo)
      : engine(train.features, queries), labels(train.labels), kernel(k), exclude_self(loo) {
    if (exclude_self && engine.query_size() != engine.reference_size()) {
      throw ArgumentError("leave-one-out scoring needs the training rows as queries");
    }
    for (Letter l : labels) ++class_size[l];
    const std::size_t max_class = *std::max_element(class_size.begin(), class_size.end());
    bins = engine.dimension() + 1;
    const std::size_t cells = engine.query_size() * kNumLetters * bins;
    use_histogram = engine.all_binary() && max_class <= 0xFFFF && cells <= (std::size_t{1} << 28);
    if (use_histogram) build_histograms();
  }

  void build_histograms() {
    histogram.assign(engine.query_size() * kNumLetters * bins, 0);
    std::vector<std::uint32_t> dist(engine.reference_size());
    for (std::size_t q = 0; q < engine.query_size(); ++q) {
      engine.hamming_distances(q, dist);
      std::uint16_t* base = histogram.data() + q * kNumLetters * bins;
      for (std::size_t j = 0; j < dist.size(); ++j) ++base[labels[j] * bins + dist[j]];
      if (exclude_self) --base[labels[q] * bins];
    }
  }

  // training samples of class c that query q is scored against
  std::size_t members(int c, std::size_t q) const {
    const std::size_t n = class_size[static_cast<std::size_t>(c)];
    return exclude_self && labels[q] == c ? n - 1 : n;
  }

  // log of the window normaliser shared by every term
  double log_kernel_norm(double h) const {
    const auto d = static_cast<double>(engine.dimension());
    if (kernel == ParzenKernel::gaussian) return -0.5 * d * std::log(2.0 * std::numbers::pi * h * h);
    return -d * std::log(h);
  }

  LetterMatrix from_histogram(double h) const {
    LetterMatrix out(engine.query_size(), kNegInf);
    const double norm = log_kernel_norm(h);
    std::vector<double> exponent(bins);
    for (std::size_t d = 0; d < bins; ++d) {
      if (kernel == ParzenKernel::gaussian) {
        exponent[d] = -static_cast<double>(d) / (2.0 * h * h);
      } else {
        // Chebyshev distance is 0 for d == 0 and 1 otherwise.
        exponent[d] = (d == 0 || 0.5 * h >= 1.0) ? 0.0 : kNegInf;
      }
    }
    for (std::size_t q = 0; q < engine.query_size(); ++q) {
      const std::uint16_t* base = histogram.data() + q * kNumLetters * bins;
      for (int c = 0; c < kNumLetters; ++c) {
        if (members(c, q) == 0) continue;
        const std::uint16_t* hist = base + static_cast<std::size_t>(c) * bins;
        double peak = kNegInf;
        for (std::size_t d = 0; d < bins; ++d) {
          if (hist[d] != 0) peak = std::max(peak, exponent[d]);
        }
        if (peak == kNegInf) continue;
        double sum = 0.0;
        for (std::size_t d = 0; d < bins; ++d) {
          if (hist[d] != 0) sum += hist[d] * std::exp(exponent[d] - peak);
        }
        out(c, q) = peak + std::log(sum) - std::log(static_cast<double>(members(c, q))) + norm;
      }
    }
    return out;
  }

  LetterMatrix from_distances(double h) const {
    LetterMatrix out(engine.query_size(), kNegInf);
    const double norm = log_kernel_norm(h);
    std::vector<double> dist(engine.reference_size());
    for (std::size_t q = 0; q < engine.query_size(); ++q) {
      std::array<double, kNumLetters> score{};
      if (kernel == ParzenKernel::gaussian) {
        engine.squared_distances(q, dist);
        if (exclude_self) dist[q] = std::numeric_limits<double>::infinity();
        std::array<double, kNumLetters> nearest;
        nearest.fill(std::numeric_limits<double>::infinity());
        for (std::size_t j = 0; j < dist.size(); ++j) {
          nearest[labels[j]] = std::min(nearest[labels[j]], dist[j]);
        }
        const double scale = 1.0 / (2.0 * h * h);
        for (std::size_t j = 0; j < dist.size(); ++j) {
          const double x = (dist[j] - nearest[labels[j]]) * scale;
          // below e^-50 of the nearest term; cannot change the sum
          if (x > 50.0) continue;
          score[labels[j]] += std::exp(-x);
        }
        for (int c = 0; c < kNumLetters; ++c) {
          if (members(c, q) == 0) continue;
          const auto ci = static_cast<std::size_t>(c);
          out(c, q) = -nearest[ci] * scale + std::log(score[ci]) -
                      std::log(static_cast<double>(members(c, q))) + norm;
        }
      } else {
        engine.chebyshev_distances(q, dist);
        for (std::size_t j = 0; j < dist.size(); ++j) {
          if (exclude_self && j == q) continue;
          if (dist[j] <= 0.5 * h) score[labels[j]] += 1.0;
        }
        for (int c = 0; c < kNumLetters; ++c) {
          const auto ci = static_cast<std::size_t>(c);
          if (members(c, q) == 0 || score[ci] == 0.0) continue;
          out(c, q) = std::log(score[ci]) - std::log(static_cast<double>(members(c, q))) + norm;
        }
      }
    }
    return out;
  }

  DistanceEngine engine;
  std::vector<Letter> labels;
  ParzenKernel kernel;
  bool exclude_self = false;
  std::array<std::size_t, kNumLetters> class_size{};
  std::size_t bins = 0;
  bool use_histogram = false;
  std::vector<std::uint16_t> histogram;  // query x letter x distance
};

ParzenScorer::ParzenScorer(const LabeledFeatures& train, const FeatureMatrix& queries,
                           ParzenKernel kernel, bool exclude_self)
    : impl_(std::make_unique<Impl>(train, queries, kernel, exclude_self)) {
  if (train.size() == 0) throw ArgumentError("Parzen window needs a nonempty training set");
}

ParzenScorer::~ParzenScorer() = default;
ParzenScorer::ParzenScorer(ParzenScorer&&) noexcept = default;

LetterMatrix ParzenScorer::log_likelihoods(double h) const {
  if (!(h > 0.0)) throw ArgumentError("bandwidth must be positive");
  return impl_->use_histogram ? impl_->from_histogram(h) : impl_->from_distances(h);
}

ClassifierOutput parzen_output(LetterMatrix loglik,
                               const std::array<double, kNumLetters>& priors) {
  const std::size_t n = loglik.samples();
  ClassifierOutput out;
  out.raw = LetterMatrix(n);
  std::size_t fallbacks = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double peak = kNegInf;
    for (int c = 0; c < kNumLetters; ++c) {
      if (priors[static_cast<std::size_t>(c)] > 0.0) peak = std::max(peak, loglik(c, j));
    }
    if (peak == kNegInf || std::isnan(peak)) {
      ++fallbacks;
      for (int c = 0; c < kNumLetters; ++c) {
        const double p = priors[static_cast<std::size_t>(c)];
        out.raw(c, j) = p;
        loglik(c, j) = p > 0.0 ? std::log(p) : kNegInf;
      }
      continue;
    }
    double sum = 0.0;
    for (int c = 0; c < kNumLetters; ++c) {
      const double p = priors[static_cast<std::size_t>(c)];
      const double v = p > 0.0 ? std::exp(loglik(c, j) - peak) * p : 0.0;
      out.raw(c, j) = v;
      sum += v;
    }
    for (int c = 0; c < kNumLetters; ++c) out.raw(c, j) /= sum;
  }
  if (fallbacks > 0) {
    log::warn("Parzen window: " + std::to_string(fallbacks) +
              " samples had zero density under every class; used class priors");
  }
  out.emissions = normalize_log_emissions(loglik);
  out.predicted = classify_argmax(out.raw);
  return out;
}

ParzenModel train_parzen(const LabeledFeatures& train, const LabeledFeatures& validation,
                         const ParzenConfig& config) {
  if (train.size() == 0 || validation.size() == 0) {
    throw ArgumentError("Parzen window needs nonempty training and validation sets");
  }
  ParzenModel model;
  model.kernel = config.kernel;
  model.train = train;
  model.priors = class_priors(train.labels);

  double h_hi = config.h_hi.value_or(largest_feature_range(train.features));
  if (!(h_hi > 0.0)) h_hi = 1.0;
  const double h_lo = config.h_lo.value_or(1e-3 * h_hi);

  const ParzenScorer scorer(train, validation.features, config.kernel);
  auto error_at = [&](double h) {
    const ClassifierOutput out = parzen_output(scorer.log_likelihoods(h), model.priors);
    std::size_t wrong = 0;
    for (std::size_t j = 0; j < out.predicted.size(); ++j) {
      wrong += out.predicted[j] != validation.labels[j];
    }
    return static_cast<double>(wrong) / static_cast<double>(validation.size());
  };
  const BandwidthSearch search =
      search_bandwidth(error_at, h_lo, h_hi, config.relative_width, config.max_iterations);
  model.bandwidth = search.best_h;
  model.search_trace = search.trace;
  return model;
}

ClassifierOutput parzen_classify(const ParzenModel& model, const FeatureMatrix& test) {
  if (test.dim != model.train.features.dim) {
    throw ArgumentError("Parzen test dimension mismatch");
  }
  const ParzenScorer scorer(model.train, test, model.kernel);
  return parzen_output(scorer.log_likelihoods(model.bandwidth), model.priors);
}

ClassifierOutput parzen_classify_leave_one_out(const ParzenModel& model) {
  const ParzenScorer scorer(model.train, model.train.features, model.kernel, true);
  return parzen_output(scorer.log_likelihoods(model.bandwidth), model.priors);
}

EmissionMatrix parzen_emissions(const ParzenModel& model, const FeatureMatrix& test) {
  return parzen_classify(model, test).emissions;
}

}  // namespace ocrhmm
