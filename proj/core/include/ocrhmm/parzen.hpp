#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ocrhmm/emission.hpp"

namespace ocrhmm {

/// gaussian: isotropic normal window with standard deviation h per dimension.
/// hypercube: uniform window of side h centred on each training sample.
enum class ParzenKernel { gaussian, hypercube };

struct ParzenConfig {
  std::optional<double> h_lo;  ///< default 1e-3 * h_hi
  std::optional<double> h_hi;  ///< default: largest per-feature range of the training set
  double relative_width = 1e-3;
  int max_iterations = 40;
  ParzenKernel kernel = ParzenKernel::gaussian;
};

struct ParzenModel {
  double bandwidth = 1.0;
  ParzenKernel kernel = ParzenKernel::gaussian;
  LabeledFeatures train;
  std::array<double, kNumLetters> priors{};
  std::vector<std::pair<double, double>> search_trace;  ///< (h, validation error)
};

struct BandwidthSearch {
  double best_h = 0.0;
  double best_error = 0.0;
  double final_width = 0.0;
  int iterations = 0;
  std::vector<std::pair<double, double>> trace;
};

/// Shrinks [h_lo, h_hi] by half per iteration toward the validation-error
/// turning point: the bracket midpoint and the midpoints of its two halves
/// are compared and the half-width bracket centred on the best of them is
/// kept. Both endpoints are evaluated first. Stops when the bracket is
/// narrower than relative_width * h_hi or after max_iterations. Returns the
/// best h observed (larger h on equal error).
BandwidthSearch search_bandwidth(const std::function<double(double)>& error_at, double h_lo,
                                 double h_hi, double relative_width = 1e-3,
                                 int max_iterations = 40);

/// Largest (max - min) over the feature columns.
double largest_feature_range(const FeatureMatrix& m);

/// Class-conditional log densities log P(x_j | C) of a fixed query batch
/// for any bandwidth. Distances are recomputed per call, except for
/// all-binary features where per-class Hamming histograms are built once.
class ParzenScorer {
 public:
  /// With `exclude_self` the queries must be the training rows; query q
  /// then scores against every training sample except itself.
  ParzenScorer(const LabeledFeatures& train, const FeatureMatrix& queries, ParzenKernel kernel,
               bool exclude_self = false);
  ~ParzenScorer();
  ParzenScorer(ParzenScorer&&) noexcept;

  LetterMatrix log_likelihoods(double h) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Posterior raw scores, emissions and predictions from log likelihoods.
/// Columns with no finite likelihood fall back to the class priors.
ClassifierOutput parzen_output(LetterMatrix log_likelihoods,
                               const std::array<double, kNumLetters>& priors);

/// Picks the bandwidth on the validation set.
ParzenModel train_parzen(const LabeledFeatures& train, const LabeledFeatures& validation,
                         const ParzenConfig& config = {});

ClassifierOutput parzen_classify(const ParzenModel& model, const FeatureMatrix& test);

/// parzen_classify on the training rows, each scored without itself.
ClassifierOutput parzen_classify_leave_one_out(const ParzenModel& model);

EmissionMatrix parzen_emissions(const ParzenModel& model, const FeatureMatrix& test);

}  // namespace ocrhmm
