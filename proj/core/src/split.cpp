#include <cmath>
#include <map>
#include <unordered_map>

#include "ocrhmm/dataset.hpp"
#include "ocrhmm/rng.hpp"

namespace ocrhmm {
namespace {

constexpr double kRatioTolerance = 1e-9;

struct FoldBucket {
  int fold = 0;
  std::vector<std::size_t> words;  // indices into the input span
  std::size_t glyphs = 0;
};

double relative_deficit(double target, std::size_t current) {
  return (target - static_cast<double>(current)) / target;
}

}  // namespace

const char* group_name(Group g) {
  switch (g) {
    case Group::train: return "train";
    case Group::validation: return "validation";
    case Group::test: return "test";
  }
  return "?";
}

double SplitRatios::operator[](Group g) const {
  switch (g) {
    case Group::train: return train;
    case Group::validation: return validation;
    case Group::test: return test;
  }
  return 0.0;
}

SplitAssignment split_dataset(std::span<const WordSequence> words, SplitRatios ratios,
                              std::uint64_t seed) {
  for (Group g : kGroups) {
    if (!(ratios[g] >= 0.0)) {
      throw ArgumentError(std::string("negative ") + group_name(g) + " ratio");
    }
  }
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (std::abs(sum - 1.0) > kRatioTolerance) {
    throw ArgumentError("split ratios sum to " + std::to_string(sum) + ", expected 1");
  }

  std::map<int, FoldBucket> by_fold;
  std::size_t total = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto& bucket = by_fold[words[i].fold];
    bucket.fold = words[i].fold;
    bucket.words.push_back(i);
    bucket.glyphs += words[i].size();
    total += words[i].size();
  }
  std::vector<FoldBucket> folds;
  folds.reserve(by_fold.size());
  for (auto& [_, bucket] : by_fold) folds.push_back(std::move(bucket));

  Rng rng(seed);
  rng.shuffle(std::span<FoldBucket>(folds));

  SplitAssignment out;
  out.seed = seed;
  out.ratios = ratios;
  std::array<double, 3> target{};
  for (Group g : kGroups) {
    target[static_cast<std::size_t>(g)] = ratios[g] * static_cast<double>(total);
  }

  auto assign_word = [&](std::size_t group, std::size_t word) {
    out.word_ids[group].push_back(words[word].word_id);
    out.glyph_counts[group] += words[word].size();
  };

  std::vector<std::size_t> remainder;
  for (const auto& fold : folds) {
    int best = -1;
    double best_deficit = 0.0;
    for (std::size_t g = 0; g < 3; ++g) {
      if (target[g] <= 0.0) continue;
      const double filled = static_cast<double>(out.glyph_counts[g] + fold.glyphs);
      if (filled > target[g] + kRatioTolerance) continue;
      const double deficit = relative_deficit(target[g], out.glyph_counts[g]);
      if (best < 0 || deficit > best_deficit) {
        best = static_cast<int>(g);
        best_deficit = deficit;
      }
    }
    if (best < 0) {
      out.partial_folds.push_back(fold.fold);
      remainder.insert(remainder.end(), fold.words.begin(), fold.words.end());
      continue;
    }
    out.whole_folds[static_cast<std::size_t>(best)].push_back(fold.fold);
    for (std::size_t w : fold.words) assign_word(static_cast<std::size_t>(best), w);
  }

  rng.shuffle(std::span<std::size_t>(remainder));
  for (std::size_t w : remainder) {
    std::size_t best = 3;
    double best_deficit = 0.0;
    for (std::size_t g = 0; g < 3; ++g) {
      if (target[g] <= 0.0) continue;
      const double deficit = relative_deficit(target[g], out.glyph_counts[g]);
      if (best == 3 || deficit > best_deficit) {
        best = g;
        best_deficit = deficit;
      }
    }
    assign_word(best, w);
  }
  return out;
}

std::vector<const WordSequence*> words_in(const Dataset& dataset, const SplitAssignment& split,
                                          Group group) {
  std::unordered_map<int, const WordSequence*> index;
  index.reserve(dataset.words.size());
  for (const auto& w : dataset.words) index.emplace(w.word_id, &w);
  std::vector<const WordSequence*> out;
  out.reserve(split[group].size());
  for (int id : split[group]) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw StructuralError("split references unknown word " + std::to_string(id));
    }
    out.push_back(it->second);
  }
  return out;
}

nlohmann::json split_to_json(const SplitAssignment& split) {
  nlohmann::json doc;
  doc["format"] = "ocrhmm-split";
  doc["version"] = 1;
  doc["seed"] = split.seed;
  doc["ratios"] = {split.ratios.train, split.ratios.validation, split.ratios.test};
  for (Group g : kGroups) {
    const auto i = static_cast<std::size_t>(g);
    doc["groups"][group_name(g)] = {
        {"word_ids", split.word_ids[i]},
        {"glyph_count", split.glyph_counts[i]},
        {"whole_folds", split.whole_folds[i]},
    };
  }
  doc["partial_folds"] = split.partial_folds;
  return doc;
}

SplitAssignment split_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "ocrhmm-split") throw ArgumentError("not a split manifest");
    SplitAssignment s;
    s.seed = doc.at("seed").get<std::uint64_t>();
    const auto& r = doc.at("ratios");
    s.ratios = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
    for (Group g : kGroups) {
      const auto i = static_cast<std::size_t>(g);
      const auto& node = doc.at("groups").at(group_name(g));
      s.word_ids[i] = node.at("word_ids").get<std::vector<int>>();
      s.glyph_counts[i] = node.at("glyph_count").get<std::size_t>();
      s.whole_folds[i] = node.at("whole_folds").get<std::vector<int>>();
    }
    s.partial_folds = doc.at("partial_folds").get<std::vector<int>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed split manifest: ") + e.what());
  }
}

}  // namespace ocrhmm
