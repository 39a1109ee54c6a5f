#include "ocrhmm/hmm.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "ocrhmm/log.hpp"

namespace ocrhmm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

void normalize_rows(TransitionMatrix& m) {
  for (auto& row : m) {
    double sum = 0.0;
    for (double v : row) sum += v;
    if (sum == 0.0) continue;
    for (double& v : row) v /= sum;
  }
}

LetterDistribution normalize(LetterDistribution counts) {
  double sum = 0.0;
  for (double v : counts) sum += v;
  if (sum > 0.0) {
    for (double& v : counts) v /= sum;
  }
  return counts;
}

using LogMatrix = std::array<std::array<double, kNumLetters>, kNumLetters>;

LogMatrix log_of(const TransitionMatrix& m) {
  LogMatrix out;
  for (int i = 0; i < kNumLetters; ++i) {
    for (int j = 0; j < kNumLetters; ++j) out[i][j] = safe_log(m[i][j]);
  }
  return out;
}

double end_factor(const HmmModel& model, int letter) {
  const auto l = static_cast<std::size_t>(letter);
  return model.end_model == EndModel::marginal ? safe_log(model.final_dist[l])
                                               : safe_log(model.end_conditional[l]);
}

}  // namespace

TransitionMatrix estimate_transition_matrix(std::span<const LetterSequence> words,
                                            double smoothing_alpha) {
  TransitionMatrix m{};
  for (const auto& w : words) {
    for (std::size_t t = 1; t < w.size(); ++t) m[w[t - 1]][w[t]] += 1.0;
  }
  if (smoothing_alpha > 0.0) {
    for (auto& row : m) {
      for (double& v : row) v += smoothing_alpha;
    }
  }
  normalize_rows(m);
  return m;
}

LetterDistribution estimate_initial_probs(std::span<const LetterSequence> words) {
  LetterDistribution c{};
  for (const auto& w : words) {
    if (!w.empty()) c[w.front()] += 1.0;
  }
  return normalize(c);
}

LetterDistribution estimate_final_probs(std::span<const LetterSequence> words) {
  LetterDistribution c{};
  for (const auto& w : words) {
    if (!w.empty()) c[w.back()] += 1.0;
  }
  return normalize(c);
}

TransitionMatrix estimate_final_transition_matrix(std::span<const LetterSequence> words) {
  TransitionMatrix m{};
  bool any = false;
  for (const auto& w : words) {
    if (w.size() < 2) continue;
    m[w[w.size() - 2]][w.back()] += 1.0;
    any = true;
  }
  if (!any) log::warn("no word of length >= 2; final transition matrix is all zero");
  normalize_rows(m);
  return m;
}

LetterDistribution estimate_end_conditionals(std::span<const LetterSequence> words) {
  LetterDistribution finals{};
  LetterDistribution occurrences{};
  for (const auto& w : words) {
    for (Letter l : w) occurrences[l] += 1.0;
    if (!w.empty()) finals[w.back()] += 1.0;
  }
  LetterDistribution out{};
  for (int l = 0; l < kNumLetters; ++l) {
    const auto i = static_cast<std::size_t>(l);
    out[i] = occurrences[i] > 0.0 ? finals[i] / occurrences[i] : 0.0;
  }
  return out;
}

HmmModel estimate_hmm(std::span<const LetterSequence> words, const HmmEstimationConfig& config) {
  HmmModel m;
  m.transition = estimate_transition_matrix(words, config.smoothing_alpha);
  m.initial = estimate_initial_probs(words);
  m.final_dist = estimate_final_probs(words);
  m.final_transition = estimate_final_transition_matrix(words);
  m.end_conditional = estimate_end_conditionals(words);
  m.end_model = config.end_model;
  return m;
}

WordEmissions WordEmissions::from_columns(const EmissionMatrix& m, std::size_t first,
                                          std::size_t length) {
  WordEmissions e;
  e.length = length;
  e.log_values.resize(length * kNumLetters);
  for (std::size_t t = 0; t < length; ++t) {
    for (int l = 0; l < kNumLetters; ++l) {
      e.log_values[t * kNumLetters + static_cast<std::size_t>(l)] = safe_log(m(l, first + t));
    }
  }
  return e;
}

DecodedWord viterbi_decode(const HmmModel& model, const WordEmissions& em, DecodeMode mode) {
  const std::size_t L = em.length;
  if (L == 0) throw StructuralError("cannot decode an empty word");
  if (mode == DecodeMode::final_transition && L >= 2 && !model.final_transition) {
    throw ArgumentError("final-transition decoding needs a final transition matrix");
  }

  const LogMatrix logA = log_of(model.transition);
  std::vector<std::array<double, kNumLetters>> score(L);
  std::vector<std::array<int, kNumLetters>> back(L);

  for (int j = 0; j < kNumLetters; ++j) {
    score[0][j] = safe_log(model.initial[static_cast<std::size_t>(j)]) + em(0, j);
    back[0][j] = -1;
  }

  auto step = [&](std::size_t t, const LogMatrix& trans) {
    for (int j = 0; j < kNumLetters; ++j) {
      int best = 0;
      double best_score = score[t - 1][0] + trans[0][j];
      for (int i = 1; i < kNumLetters; ++i) {
        const double s = score[t - 1][i] + trans[i][j];
        if (s > best_score) {
          best = i;
          best_score = s;
        }
      }
      score[t][j] = best_score + em(t, j);
      back[t][j] = best;
    }
  };

  const bool separate_last = mode == DecodeMode::final_transition && L >= 2;
  for (std::size_t t = 1; t < L; ++t) {
    if (separate_last && t == L - 1) {
      step(t, log_of(*model.final_transition));
    } else {
      step(t, logA);
    }
  }

  std::array<double, kNumLetters> terminal = score[L - 1];
  const bool end_term =
      mode == DecodeMode::end_state || (mode == DecodeMode::final_transition && L == 1);
  if (end_term) {
    for (int j = 0; j < kNumLetters; ++j) terminal[j] += end_factor(model, j);
  }

  int last = 0;
  for (int j = 1; j < kNumLetters; ++j) {
    if (terminal[j] > terminal[last]) last = j;
  }

  DecodedWord out;
  out.letters.resize(L);
  if (terminal[last] == kNegInf) {
    out.fell_back = true;
    out.log_likelihood = kNegInf;
    for (std::size_t t = 0; t < L; ++t) {
      int best = 0;
      for (int j = 1; j < kNumLetters; ++j) {
        if (em(t, j) > em(t, best)) best = j;
      }
      out.letters[t] = static_cast<Letter>(best);
    }
    log::debug("word of length " + std::to_string(L) +
               " has no finite path; using emission argmax");
    return out;
  }
  out.log_likelihood = terminal[last];
  int state = last;
  for (std::size_t t = L; t-- > 0;) {
    out.letters[t] = static_cast<Letter>(state);
    state = back[t][state];
  }
  return out;
}

double path_log_score(const HmmModel& model, const WordEmissions& em,
                      std::span<const Letter> path, DecodeMode mode) {
  const std::size_t L = em.length;
  if (path.size() != L || L == 0) throw ArgumentError("path length must match the word");
  double s = safe_log(model.initial[path[0]]) + em(0, path[0]);
  for (std::size_t t = 1; t < L; ++t) {
    const bool last_step = mode == DecodeMode::final_transition && t == L - 1;
    const TransitionMatrix& a = last_step ? *model.final_transition : model.transition;
    s = s + safe_log(a[path[t - 1]][path[t]]) + em(t, path[t]);
  }
  if (mode == DecodeMode::end_state || (mode == DecodeMode::final_transition && L == 1)) {
    s += end_factor(model, path[L - 1]);
  }
  return s;
}

std::vector<DecodedWord> correct_words(const HmmModel& model, const EmissionMatrix& emissions,
                                       std::span<const WordSpan> words, DecodeMode mode) {
  std::vector<DecodedWord> out;
  out.reserve(words.size());
  std::size_t fallbacks = 0;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const WordSpan& span = words[w];
    if (span.length == 0 || span.first_column + span.length > emissions.samples()) {
      throw StructuralError("word " + std::to_string(w) + " spans columns [" +
                            std::to_string(span.first_column) + ", " +
                            std::to_string(span.first_column + span.length) +
                            ") outside an emission matrix of " +
                            std::to_string(emissions.samples()) + " samples");
    }
    out.push_back(viterbi_decode(
        model, WordEmissions::from_columns(emissions, span.first_column, span.length), mode));
    fallbacks += out.back().fell_back;
  }
  if (fallbacks > 0) {
    log::info("HMM(" + std::to_string(static_cast<int>(mode)) + "): " +
              std::to_string(fallbacks) + " words had no finite path");
  }
  return out;
}

nlohmann::json hmm_to_json(const HmmModel& model) {
  nlohmann::json doc;
  doc["format"] = "ocrhmm-hmm";
  doc["version"] = 1;
  doc["transition"] = model.transition;
  doc["initial"] = model.initial;
  doc["final_dist"] = model.final_dist;
  doc["final_transition"] =
      model.final_transition ? nlohmann::json(*model.final_transition) : nlohmann::json(nullptr);
  doc["end_conditional"] = model.end_conditional;
  doc["end_model"] = model.end_model == EndModel::marginal ? "marginal" : "conditional";
  return doc;
}

HmmModel hmm_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "ocrhmm-hmm") throw ArgumentError("not an HMM document");
    HmmModel m;
    m.transition = doc.at("transition").get<TransitionMatrix>();
    m.initial = doc.at("initial").get<LetterDistribution>();
    m.final_dist = doc.at("final_dist").get<LetterDistribution>();
    if (!doc.at("final_transition").is_null()) {
      m.final_transition = doc.at("final_transition").get<TransitionMatrix>();
    }
    m.end_conditional = doc.at("end_conditional").get<LetterDistribution>();
    m.end_model = doc.at("end_model") == "conditional" ? EndModel::conditional : EndModel::marginal;
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed HMM document: ") + e.what());
  }
}

void write_decode_csv(std::ostream& out, std::span<const WordSpan> words,
                      std::span<const Letter> truth, std::span<const Letter> base,
                      std::span<const DecodedWord> decoded, DecodeMode mode) {
  out << "word_index,truth,base_prediction,decoded,mode\n";
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::string t, b, d;
    for (std::size_t i = 0; i < words[w].length; ++i) {
      t.push_back(letter_char(truth[words[w].first_column + i]));
      b.push_back(letter_char(base[words[w].first_column + i]));
      d.push_back(letter_char(decoded[w].letters[i]));
    }
    out << w << ',' << t << ',' << b << ',' << d << ',' << static_cast<int>(mode) << '\n';
  }
}

}  // namespace ocrhmm
