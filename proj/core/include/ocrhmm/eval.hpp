#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ocrhmm/dataset.hpp"
#include "ocrhmm/features.hpp"
#include "ocrhmm/hmm.hpp"
#include "ocrhmm/knn.hpp"
#include "ocrhmm/naive_bayes.hpp"
#include "ocrhmm/neural.hpp"
#include "ocrhmm/parzen.hpp"

namespace ocrhmm {

enum class ClassifierKind { knn, nn, pw, nb };

inline constexpr std::array<ClassifierKind, 4> kAllClassifiers{
    ClassifierKind::knn, ClassifierKind::nn, ClassifierKind::pw, ClassifierKind::nb};

/// Short tags used in configs and CSV: knn, nn, pw, nb.
const char* classifier_tag(ClassifierKind kind);
ClassifierKind parse_classifier(std::string_view tag);

/// 100 * matches / length. Throws ArgumentError on unequal or zero lengths.
double letter_accuracy(std::span<const Letter> predicted, std::span<const Letter> truth);

/// Percentage of words whose letters all match.
double word_accuracy(std::span<const WordSpan> words, std::span<const Letter> predicted,
                     std::span<const Letter> truth);

/// Hidden layer sizes per feature set. g and h have no published size and
/// reuse the f size.
std::size_t default_hidden_nodes(FeatureSet set);
/// False for the combinations with no published result (NN on g, h).
bool is_reference_cell(ClassifierKind kind, FeatureSet set);

struct CellConfig {
  KnnSearchConfig knn;
  ParzenConfig parzen;
  NaiveBayesConfig naive_bayes;
  NeuralConfig neural;
  std::map<FeatureSet, std::size_t> hidden_nodes;  ///< overrides default_hidden_nodes
  bool standardize = false;                        ///< z-score features on the training split
  std::array<bool, 3> modes{true, true, true};     ///< HMM modes to decode
};

struct CellResult {
  ClassifierKind classifier = ClassifierKind::knn;
  FeatureSet features = FeatureSet::a;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::array<double, 3> hmm{};  ///< modes 1, 2, 3; NaN when not decoded
  std::optional<double> param;  ///< h, k or mean epochs
  std::size_t hidden_nodes = 0;  ///< NN only
  double train_minutes = 0.0;
  double test_minutes = 0.0;
  double word_accuracy = 0.0;
  std::array<double, 3> hmm_word_accuracy{};
  bool reference_cell = true;
  std::optional<std::string> error;  ///< set when the cell failed
};

struct CellArtifacts {
  nlohmann::json model;
  EmissionMatrix emissions;
  std::vector<Letter> base_prediction;
  std::array<std::vector<DecodedWord>, 3> decoded;
};

/// Everything the cells of one run share: the split, per-group glyph order,
/// labels, test word spans and the HMM estimated from the training words.
class Experiment {
 public:
  Experiment(const Dataset& dataset, SplitAssignment split,
             const HmmEstimationConfig& hmm_config = {});

  const Dataset& dataset() const { return dataset_; }
  const SplitAssignment& split() const { return split_; }
  const HmmModel& hmm() const { return hmm_; }
  /// Glyph indices of a group, word by word in split order.
  std::span<const std::size_t> glyphs(Group g) const { return glyphs_[index(g)]; }
  std::span<const Letter> labels(Group g) const { return labels_[index(g)]; }
  std::span<const WordSpan> test_words() const { return test_words_; }

  LabeledFeatures features(FeatureSet set, Group g) const;

 private:
  static std::size_t index(Group g) { return static_cast<std::size_t>(g); }

  const Dataset& dataset_;
  SplitAssignment split_;
  std::array<std::vector<std::size_t>, 3> glyphs_;
  std::array<std::vector<Letter>, 3> labels_;
  std::vector<WordSpan> test_words_;
  HmmModel hmm_;
  FeatureExtractor extractor_;
};

/// Trains on the training split (validation picks k, h or the stopping
/// epoch), scores train and test accuracy from raw-score argmax, decodes the
/// test emissions with HMM modes 1-3 and times both phases. Train accuracy
/// is leave-one-out for kNN and PW and resubstitution otherwise. Errors are
/// rethrown with the cell named.
CellResult run_cell(const Experiment& experiment, ClassifierKind kind, FeatureSet set,
                    const CellConfig& config = {}, CellArtifacts* artifacts = nullptr);

struct AverageRow {
  std::string label;  ///< classifier tag, or "total"
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::array<double, 3> hmm{};
  std::optional<double> param;  ///< mean over cells that have one
  double train_minutes = 0.0;
  double test_minutes = 0.0;
  std::size_t cells = 0;
};

struct EvalReport {
  std::vector<CellResult> cells;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  bool timings_reliable = true;

  /// One row per classifier in order of first appearance, then "total".
  /// Failed cells are left out.
  std::vector<AverageRow> averages() const;
};

enum class ReportFormat { csv, markdown };

struct RenderOptions {
  bool timings = true;  ///< false prints "-" so reruns compare byte for byte
};

/// Columns: classifier, features, train, test, hmm1, hmm2, hmm3, param,
/// train_time, test_time; then the average rows.
std::string render_report(const EvalReport& report, ReportFormat format,
                          const RenderOptions& options = {});

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);

}  // namespace ocrhmm
