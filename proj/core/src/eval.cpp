#include "ocrhmm/eval.hpp"

#include <chrono>
#include <limits>
#include <numeric>
#include <string>

#include "ocrhmm/log.hpp"
#include "ocrhmm/model_io.hpp"

namespace ocrhmm {

const char* classifier_tag(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::nn: return "nn";
    case ClassifierKind::pw: return "pw";
    case ClassifierKind::nb: return "nb";
  }
  return "?";
}

ClassifierKind parse_classifier(std::string_view tag) {
  for (ClassifierKind k : kAllClassifiers) {
    if (tag == classifier_tag(k)) return k;
  }
  throw ArgumentError("unknown classifier '" + std::string(tag) + "' (expected knn, nn, pw or nb)");
}

double letter_accuracy(std::span<const Letter> predicted, std::span<const Letter> truth) {
  if (predicted.size() != truth.size()) {
    throw ArgumentError("accuracy over sequences of length " + std::to_string(predicted.size()) +
                        " and " + std::to_string(truth.size()));
  }
  if (truth.empty()) throw ArgumentError("accuracy of an empty sequence");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

double word_accuracy(std::span<const WordSpan> words, std::span<const Letter> predicted,
                     std::span<const Letter> truth) {
  if (words.empty()) return 0.0;
  std::size_t hits = 0;
  for (const WordSpan& w : words) {
    bool all = true;
    for (std::size_t i = w.first_column; i < w.first_column + w.length; ++i) {
      all = all && predicted[i] == truth[i];
    }
    hits += all;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(words.size());
}

std::size_t default_hidden_nodes(FeatureSet set) {
  switch (set) {
    case FeatureSet::a: return 12;
    case FeatureSet::b: return 16;
    case FeatureSet::c: return 28;
    case FeatureSet::d:
    case FeatureSet::e: return 35;
    case FeatureSet::f:
    case FeatureSet::g:
    case FeatureSet::h: return 64;
  }
  return 64;
}

bool is_reference_cell(ClassifierKind kind, FeatureSet set) {
  return !(kind == ClassifierKind::nn && (set == FeatureSet::g || set == FeatureSet::h));
}

Experiment::Experiment(const Dataset& dataset, SplitAssignment split,
                       const HmmEstimationConfig& hmm_config)
    : dataset_(dataset), split_(std::move(split)), extractor_(dataset.glyphs) {
  std::vector<LetterSequence> training_words;
  for (Group g : kGroups) {
    auto& glyphs = glyphs_[index(g)];
    auto& labels = labels_[index(g)];
    for (const WordSequence* w : words_in(dataset_, split_, g)) {
      if (g == Group::test) test_words_.push_back({glyphs.size(), w->size()});
      LetterSequence letters;
      for (std::size_t gi : w->glyphs) {
        glyphs.push_back(gi);
        labels.push_back(dataset_.glyphs[gi].letter);
        letters.push_back(dataset_.glyphs[gi].letter);
      }
      if (g == Group::train) training_words.push_back(std::move(letters));
    }
  }
  hmm_ = estimate_hmm(training_words, hmm_config);
}

LabeledFeatures Experiment::features(FeatureSet set, Group g) const {
  LabeledFeatures out;
  out.features = extractor_.extract(set, glyphs(g));
  out.labels.assign(labels(g).begin(), labels(g).end());
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double minutes_since(Clock::time_point start) {
  return std::chrono::duration<double, std::ratio<60>>(Clock::now() - start).count();
}

struct Trained {
  ClassifierOutput train_out;
  ClassifierOutput test_out;
  nlohmann::json model;
};

}  // namespace

CellResult run_cell(const Experiment& experiment, ClassifierKind kind, FeatureSet set,
                    const CellConfig& config, CellArtifacts* artifacts) {
  CellResult r;
  r.classifier = kind;
  r.features = set;
  r.reference_cell = is_reference_cell(kind, set);
  const std::string name = std::string(classifier_tag(kind)) + "/" + feature_set_tag(set);

  try {
    LabeledFeatures train = experiment.features(set, Group::train);
    LabeledFeatures validation = experiment.features(set, Group::validation);
    LabeledFeatures test = experiment.features(set, Group::test);
    if (config.standardize) {
      const Standardizer z = Standardizer::fit(train.features);
      z.apply(train.features);
      z.apply(validation.features);
      z.apply(test.features);
    }

    const bool keep_model = artifacts != nullptr;
    Trained t;
    auto start = Clock::now();
    switch (kind) {
      case ClassifierKind::knn: {
        const KnnModel m = train_knn(train, validation, config.knn);
        r.train_minutes = minutes_since(start);
        r.param = m.k;
        t.train_out = knn_classify_leave_one_out(m);
        start = Clock::now();
        t.test_out = knn_classify(m, test.features);
        if (keep_model) t.model = model_to_json(m);
        break;
      }
      case ClassifierKind::pw: {
        const ParzenModel m = train_parzen(train, validation, config.parzen);
        r.train_minutes = minutes_since(start);
        r.param = m.bandwidth;
        t.train_out = parzen_classify_leave_one_out(m);
        start = Clock::now();
        t.test_out = parzen_classify(m, test.features);
        if (keep_model) t.model = model_to_json(m);
        break;
      }
      case ClassifierKind::nb: {
        const NaiveBayesModel m = train_naive_bayes(train, config.naive_bayes);
        r.train_minutes = minutes_since(start);
        t.train_out = nb_classify(m, train.features);
        start = Clock::now();
        t.test_out = nb_classify(m, test.features);
        if (keep_model) t.model = model_to_json(m);
        break;
      }
      case ClassifierKind::nn: {
        const auto it = config.hidden_nodes.find(set);
        r.hidden_nodes = it != config.hidden_nodes.end() ? it->second : default_hidden_nodes(set);
        const OaaNetworkModel m = train_neural_oaa(train, validation, r.hidden_nodes, config.neural);
        r.train_minutes = minutes_since(start);
        r.param = m.mean_epochs;
        t.train_out = nn_classify(m, train.features);
        start = Clock::now();
        t.test_out = nn_classify(m, test.features);
        if (keep_model) t.model = model_to_json(m);
        break;
      }
    }

    const auto test_words = experiment.test_words();
    std::array<std::vector<DecodedWord>, 3> decoded;
    std::array<std::vector<Letter>, 3> corrected;
    for (int mode = 1; mode <= 3; ++mode) {
      const auto i = static_cast<std::size_t>(mode - 1);
      if (!config.modes[i]) continue;
      decoded[i] = correct_words(experiment.hmm(), t.test_out.emissions, test_words,
                                 static_cast<DecodeMode>(mode));
      for (const DecodedWord& w : decoded[i]) {
        corrected[i].insert(corrected[i].end(), w.letters.begin(), w.letters.end());
      }
    }
    r.test_minutes = minutes_since(start);

    r.train_accuracy = letter_accuracy(t.train_out.predicted, train.labels);
    r.test_accuracy = letter_accuracy(t.test_out.predicted, test.labels);
    r.word_accuracy = word_accuracy(test_words, t.test_out.predicted, test.labels);
    for (std::size_t i = 0; i < 3; ++i) {
      if (!config.modes[i]) {
        r.hmm[i] = r.hmm_word_accuracy[i] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      r.hmm[i] = letter_accuracy(corrected[i], test.labels);
      r.hmm_word_accuracy[i] = word_accuracy(test_words, corrected[i], test.labels);
    }

    log::info(name + ": test " + std::to_string(r.test_accuracy) + ", hmm2 " +
              std::to_string(r.hmm[1]));
    if (artifacts) {
      artifacts->model = std::move(t.model);
      artifacts->emissions = std::move(t.test_out.emissions);
      artifacts->base_prediction = std::move(t.test_out.predicted);
      artifacts->decoded = std::move(decoded);
    }
  } catch (const std::exception& e) {
    throw Error("cell " + name + ": " + e.what());
  }
  return r;
}

std::vector<AverageRow> EvalReport::averages() const {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const CellResult*>> groups;
  std::vector<const CellResult*> all;
  for (const CellResult& c : cells) {
    if (c.error) continue;
    const std::string tag = classifier_tag(c.classifier);
    if (!groups.contains(tag)) order.push_back(tag);
    groups[tag].push_back(&c);
    all.push_back(&c);
  }

  auto average = [](std::string label, const std::vector<const CellResult*>& members) {
    AverageRow row;
    row.label = std::move(label);
    row.cells = members.size();
    double param_sum = 0.0;
    std::size_t param_count = 0;
    for (const CellResult* c : members) {
      row.train_accuracy += c->train_accuracy;
      row.test_accuracy += c->test_accuracy;
      for (std::size_t i = 0; i < 3; ++i) row.hmm[i] += c->hmm[i];
      row.train_minutes += c->train_minutes;
      row.test_minutes += c->test_minutes;
      if (c->param) {
        param_sum += *c->param;
        ++param_count;
      }
    }
    const auto n = static_cast<double>(members.size());
    row.train_accuracy /= n;
    row.test_accuracy /= n;
    for (double& v : row.hmm) v /= n;
    row.train_minutes /= n;
    row.test_minutes /= n;
    if (param_count > 0) row.param = param_sum / static_cast<double>(param_count);
    return row;
  };

  std::vector<AverageRow> out;
  for (const std::string& tag : order) out.push_back(average(tag, groups[tag]));
  if (!all.empty()) out.push_back(average("total", all));
  return out;
}

}  // namespace ocrhmm
