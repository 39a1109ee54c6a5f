#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "ocrhmm/features.hpp"
#include "ocrhmm/types.hpp"

namespace ocrhmm {

/// 26 x N matrix of per-letter scores; row = letter, column = sample.
class LetterMatrix {
 public:
  LetterMatrix() = default;
  explicit LetterMatrix(std::size_t samples, double fill = 0.0)
      : samples_(samples), values_(samples * kNumLetters, fill) {}

  std::size_t samples() const { return samples_; }

  double& operator()(int letter, std::size_t sample) {
    return values_[static_cast<std::size_t>(letter) * samples_ + sample];
  }
  double operator()(int letter, std::size_t sample) const {
    return values_[static_cast<std::size_t>(letter) * samples_ + sample];
  }

  std::span<double> row(int letter) {
    return {values_.data() + static_cast<std::size_t>(letter) * samples_, samples_};
  }
  std::span<const double> row(int letter) const {
    return {values_.data() + static_cast<std::size_t>(letter) * samples_, samples_};
  }

  const std::vector<double>& data() const { return values_; }

  friend bool operator==(const LetterMatrix&, const LetterMatrix&) = default;

 private:
  std::size_t samples_ = 0;
  std::vector<double> values_;
};

/// Row-normalized emission probabilities P(observation j | letter r),
/// normalized across the samples of each row.
struct EmissionMatrix {
  LetterMatrix probs;
  std::vector<Letter> zero_rows;  ///< rows that had no mass and stay zero

  std::size_t samples() const { return probs.samples(); }
  double operator()(int letter, std::size_t sample) const { return probs(letter, sample); }
};

/// Divides each row by its sum. Throws ArgumentError on a negative or
/// non-finite entry.
EmissionMatrix normalize_emissions(const LetterMatrix& raw);

/// Same result as normalize_emissions(exp(log_raw)) but computed with a
/// per-row log-sum-exp so tiny likelihoods do not underflow first.
EmissionMatrix normalize_log_emissions(const LetterMatrix& log_raw);

/// Per column, the letter with the largest score; ties go to the lower letter.
std::vector<Letter> classify_argmax(const LetterMatrix& raw);

/// What every base classifier produces for a batch of samples.
struct ClassifierOutput {
  LetterMatrix raw;          ///< decision scores (hard prediction source)
  EmissionMatrix emissions;  ///< HMM emission probabilities
  std::vector<Letter> predicted;
};

/// Features paired with their true letters.
struct LabeledFeatures {
  FeatureMatrix features;
  std::vector<Letter> labels;

  std::size_t size() const { return labels.size(); }
};

/// Empirical letter frequencies; all 26 entries, zero for absent letters.
std::array<double, kNumLetters> class_priors(std::span<const Letter> labels);

/// CSV: header `letter,s1..sN`, then one row per letter.
void write_emission_csv(std::ostream& out, const EmissionMatrix& m);

}  // namespace ocrhmm
