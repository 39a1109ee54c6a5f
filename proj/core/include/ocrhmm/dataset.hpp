#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ocrhmm/bitmap.hpp"
#include "ocrhmm/types.hpp"

namespace ocrhmm {

struct Glyph {
  int id = 0;
  Letter letter = 0;
  std::optional<int> next_id;  ///< empty where the file says -1
  int word_id = 0;
  int position = 1;
  int fold = 0;
  Bitmap bitmap;

  friend bool operator==(const Glyph&, const Glyph&) = default;
};

/// One handwritten word; `glyphs` index into the owning glyph collection.
struct WordSequence {
  int word_id = 0;
  int fold = 0;
  std::vector<std::size_t> glyphs;

  std::size_t size() const { return glyphs.size(); }
};

struct Dataset {
  std::vector<Glyph> glyphs;
  std::vector<WordSequence> words;

  std::string spelling(const WordSequence& word) const;
  std::size_t distinct_spellings() const;
  /// Sorted distinct fold labels.
  std::vector<int> folds() const;
};

/// Reads the tab-separated letter file: id, letter, next_id, word_id,
/// position, fold, then 128 pixels. Throws ParseError naming the line.
Dataset parse_dataset(std::istream& source);

/// Opens `path` (plain or gzip-compressed) and parses it.
Dataset load_dataset(const std::filesystem::path& path);

/// Writes glyphs back in the same tab-separated schema.
void write_dataset(std::ostream& out, std::span<const Glyph> glyphs);

/// Groups consecutive glyphs with equal word_id; a missing next_id closes
/// the current word. Throws StructuralError when positions are not 1, 2, ...
std::vector<WordSequence> assemble_words(std::span<const Glyph> glyphs);

// ---------------------------------------------------------------------------
// Splitting

enum class Group : int { train = 0, validation = 1, test = 2 };
inline constexpr std::array<Group, 3> kGroups{Group::train, Group::validation, Group::test};
const char* group_name(Group g);

struct SplitRatios {
  double train = 1.0 / 3.0;
  double validation = 1.0 / 3.0;
  double test = 1.0 / 3.0;

  double operator[](Group g) const;
};

struct SplitAssignment {
  std::array<std::vector<int>, 3> word_ids;   ///< per Group, in assignment order
  std::array<std::size_t, 3> glyph_counts{};  ///< per Group
  std::array<std::vector<int>, 3> whole_folds;
  std::vector<int> partial_folds;
  std::uint64_t seed = 0;
  SplitRatios ratios;

  const std::vector<int>& operator[](Group g) const {
    return word_ids[static_cast<std::size_t>(g)];
  }
};

/// Assigns whole folds greedily toward each group's glyph target; folds
/// that do not fit are scrambled at word level and dealt to the group with
/// the largest relative deficit. Throws ArgumentError on a negative ratio or
/// ratios not summing to 1.
SplitAssignment split_dataset(std::span<const WordSequence> words, SplitRatios ratios,
                              std::uint64_t seed);

/// Words of `dataset` belonging to `group`, in the split's order.
std::vector<const WordSequence*> words_in(const Dataset& dataset, const SplitAssignment& split,
                                          Group group);

nlohmann::json split_to_json(const SplitAssignment& split);
SplitAssignment split_from_json(const nlohmann::json& doc);

}  // namespace ocrhmm
