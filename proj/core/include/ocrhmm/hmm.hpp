#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "ocrhmm/emission.hpp"
#include "ocrhmm/types.hpp"

namespace ocrhmm {

using LetterSequence = std::vector<Letter>;
using LetterDistribution = std::array<double, kNumLetters>;
/// [from][to]
using TransitionMatrix = std::array<std::array<double, kNumLetters>, kNumLetters>;

/// How the end-of-word factor of the end-state decoder is formed.
/// marginal: P(letter is last), the final-letter distribution.
/// conditional: P(word ends | letter), final count over all occurrences.
enum class EndModel { marginal, conditional };

struct HmmModel {
  TransitionMatrix transition{};
  LetterDistribution initial{};
  LetterDistribution final_dist{};
  std::optional<TransitionMatrix> final_transition;  ///< penultimate -> last
  LetterDistribution end_conditional{};
  EndModel end_model = EndModel::marginal;
};

struct HmmEstimationConfig {
  double smoothing_alpha = 0.0;  ///< add-alpha on transition counts
  EndModel end_model = EndModel::marginal;
};

/// Within-word adjacent pair counts, rows normalized; rows with no count
/// stay zero (unless smoothing_alpha > 0).
TransitionMatrix estimate_transition_matrix(std::span<const LetterSequence> words,
                                            double smoothing_alpha = 0.0);
LetterDistribution estimate_initial_probs(std::span<const LetterSequence> words);
LetterDistribution estimate_final_probs(std::span<const LetterSequence> words);
/// Only (penultimate, last) pairs; warns when no word has length >= 2.
TransitionMatrix estimate_final_transition_matrix(std::span<const LetterSequence> words);
LetterDistribution estimate_end_conditionals(std::span<const LetterSequence> words);

HmmModel estimate_hmm(std::span<const LetterSequence> words, const HmmEstimationConfig& config = {});

/// 1: whole word as one chain.
/// 2: chain plus an end state scoring the last letter.
/// 3: chain up to the penultimate letter, then a separate last transition.
enum class DecodeMode { whole_word = 1, end_state = 2, final_transition = 3 };

struct DecodedWord {
  LetterSequence letters;
  double log_likelihood = 0.0;
  bool fell_back = false;  ///< every path had zero probability
};

/// Log emissions for one word: `length` x 26, time-major.
struct WordEmissions {
  std::size_t length = 0;
  std::vector<double> log_values;

  double operator()(std::size_t t, int letter) const {
    return log_values[t * kNumLetters + static_cast<std::size_t>(letter)];
  }
  static WordEmissions from_columns(const EmissionMatrix& m, std::size_t first, std::size_t length);
};

/// Log-space Viterbi. Ties go to the lower letter at every step. When no
/// path has finite score the word is labelled by per-column emission argmax.
DecodedWord viterbi_decode(const HmmModel& model, const WordEmissions& emissions, DecodeMode mode);

/// Log score of a fixed letter path under the same objective as viterbi_decode.
double path_log_score(const HmmModel& model, const WordEmissions& emissions,
                      std::span<const Letter> path, DecodeMode mode);

/// Contiguous emission columns of one test word.
struct WordSpan {
  std::size_t first_column = 0;
  std::size_t length = 0;
};

/// Decodes each word independently. Throws StructuralError if a span
/// leaves the matrix or is empty.
std::vector<DecodedWord> correct_words(const HmmModel& model, const EmissionMatrix& emissions,
                                       std::span<const WordSpan> words, DecodeMode mode);

nlohmann::json hmm_to_json(const HmmModel& model);
HmmModel hmm_from_json(const nlohmann::json& doc);

/// CSV `word_index,truth,base_prediction,decoded,mode`.
void write_decode_csv(std::ostream& out, std::span<const WordSpan> words,
                      std::span<const Letter> truth, std::span<const Letter> base,
                      std::span<const DecodedWord> decoded, DecodeMode mode);

}  // namespace ocrhmm
