#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "ocrhmm/dataset.hpp"
#include "synthetic.hpp"

using namespace ocrhmm;

namespace {

std::string record(int id, char letter, int next_id, int word_id, int position, int fold,
                   const std::string& pixel_override = "") {
  std::ostringstream s;
  s << id << '\t' << letter << '\t' << next_id << '\t' << word_id << '\t' << position << '\t'
    << fold;
  for (int i = 0; i < 128; ++i) s << '\t' << (i % 3 == 0 ? 1 : 0);
  if (!pixel_override.empty()) s << pixel_override;
  s << '\n';
  return s.str();
}

Glyph glyph(int id, int word_id, int position, std::optional<int> next, int fold = 0) {
  Glyph g;
  g.id = id;
  g.word_id = word_id;
  g.position = position;
  g.next_id = next;
  g.fold = fold;
  return g;
}

}  // namespace

TEST(ParseDataset, EmptyStream) {
  std::istringstream in("");
  const Dataset d = parse_dataset(in);
  EXPECT_TRUE(d.glyphs.empty());
  EXPECT_TRUE(d.words.empty());
}

TEST(ParseDataset, TwoLinkedRecordsFormOneWord) {
  std::istringstream in(record(1, 'o', 2, 1, 1, 3) + record(2, 'k', -1, 1, 2, 3));
  const Dataset d = parse_dataset(in);
  ASSERT_EQ(d.glyphs.size(), 2u);
  ASSERT_EQ(d.words.size(), 1u);
  EXPECT_EQ(d.words[0].size(), 2u);
  EXPECT_EQ(d.words[0].fold, 3);
  EXPECT_EQ(d.spelling(d.words[0]), "ok");
  EXPECT_EQ(d.glyphs[0].next_id, 2);
  EXPECT_FALSE(d.glyphs[1].next_id.has_value());
  EXPECT_TRUE(d.glyphs[0].bitmap.pixel(0));
  EXPECT_FALSE(d.glyphs[0].bitmap.pixel(1));
  EXPECT_TRUE(d.glyphs[0].bitmap.pixel(3));
}

TEST(ParseDataset, TrailingTabAndCarriageReturnAccepted) {
  std::string line = record(1, 'a', -1, 1, 1, 0);
  line.insert(line.size() - 1, "\t\r");
  std::istringstream in(line);
  EXPECT_EQ(parse_dataset(in).glyphs.size(), 1u);
}

TEST(ParseDataset, ErrorsNameTheLine) {
  const std::string good = record(1, 'a', -1, 1, 1, 0);
  std::string bad_pixel = record(2, 'b', -1, 2, 1, 0);
  bad_pixel.replace(bad_pixel.rfind('0'), 1, "2");
  std::string bad_letter = record(2, 'B', -1, 2, 1, 0);
  std::string short_line = "2\tb\t-1\t2\t1\t0\t1\t0\n";

  for (const std::string& second : {bad_pixel, bad_letter, short_line}) {
    std::istringstream in(good + second);
    try {
      parse_dataset(in);
      FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 2u);
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
  }
}

TEST(AssembleWords, GroupsConsecutiveWordIds) {
  const std::vector<Glyph> glyphs{glyph(1, 7, 1, 2), glyph(2, 7, 2, std::nullopt),
                                  glyph(3, 9, 1, 4), glyph(4, 9, 2, 5),
                                  glyph(5, 9, 3, std::nullopt)};
  const auto words = assemble_words(glyphs);
  ASSERT_EQ(words.size(), 2u);
  EXPECT_EQ(words[0].size(), 2u);
  EXPECT_EQ(words[1].size(), 3u);
  EXPECT_EQ(words[1].word_id, 9);
  EXPECT_EQ(words[1].glyphs, (std::vector<std::size_t>{2, 3, 4}));
}

TEST(AssembleWords, Singleton) {
  const std::vector<Glyph> glyphs{glyph(1, 1, 1, std::nullopt)};
  const auto words = assemble_words(glyphs);
  ASSERT_EQ(words.size(), 1u);
  EXPECT_EQ(words[0].size(), 1u);
}

TEST(AssembleWords, NonContiguousPositionIsStructuralError) {
  const std::vector<Glyph> glyphs{glyph(1, 4, 1, 2), glyph(2, 4, 3, std::nullopt)};
  try {
    assemble_words(glyphs);
    FAIL();
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find('4'), std::string::npos);
  }
}

TEST(AssembleWords, FoldChangeInsideWordIsStructuralError) {
  const std::vector<Glyph> glyphs{glyph(1, 4, 1, 2, 0), glyph(2, 4, 2, std::nullopt, 1)};
  EXPECT_THROW(assemble_words(glyphs), StructuralError);
}

TEST(AssembleWords, PreservesGlyphCount) {
  const Dataset d = test_support::synthetic_dataset();
  const auto words = assemble_words(d.glyphs);
  std::size_t total = 0;
  std::set<std::size_t> seen;
  for (const auto& w : words) {
    total += w.size();
    seen.insert(w.glyphs.begin(), w.glyphs.end());
  }
  EXPECT_EQ(total, d.glyphs.size());
  EXPECT_EQ(seen.size(), d.glyphs.size());
}

TEST(WriteDataset, RoundTripIsBitExact) {
  const Dataset d = test_support::synthetic_dataset();
  std::stringstream buffer;
  write_dataset(buffer, d.glyphs);
  const Dataset back = parse_dataset(buffer);
  ASSERT_EQ(back.glyphs.size(), d.glyphs.size());
  for (std::size_t i = 0; i < d.glyphs.size(); ++i) EXPECT_EQ(back.glyphs[i], d.glyphs[i]);
  EXPECT_EQ(back.words.size(), d.words.size());
}

// ---------------------------------------------------------------------------

namespace {

std::vector<WordSequence> one_word_per_fold(int folds, std::size_t length) {
  std::vector<WordSequence> words;
  for (int f = 0; f < folds; ++f) {
    WordSequence w{f + 1, f, {}};
    for (std::size_t i = 0; i < length; ++i) w.glyphs.push_back(static_cast<std::size_t>(f) * length + i);
    words.push_back(w);
  }
  return words;
}

void expect_partition(const SplitAssignment& s, std::span<const WordSequence> words) {
  std::multiset<int> assigned;
  std::size_t glyphs = 0;
  for (Group g : kGroups) {
    assigned.insert(s[g].begin(), s[g].end());
    glyphs += s.glyph_counts[static_cast<std::size_t>(g)];
  }
  std::multiset<int> expected;
  std::size_t total = 0;
  for (const auto& w : words) {
    expected.insert(w.word_id);
    total += w.size();
  }
  EXPECT_EQ(assigned, expected);
  EXPECT_EQ(glyphs, total);
}

}  // namespace

TEST(SplitDataset, DegenerateRatioPutsEverythingInTrain) {
  const Dataset d = test_support::synthetic_dataset();
  const auto s = split_dataset(d.words, {1.0, 0.0, 0.0}, 3);
  EXPECT_EQ(s[Group::train].size(), d.words.size());
  EXPECT_TRUE(s[Group::validation].empty());
  EXPECT_TRUE(s[Group::test].empty());
}

TEST(SplitDataset, WholeFoldsFollowRatios) {
  const auto words = one_word_per_fold(10, 4);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = split_dataset(words, {0.5, 0.3, 0.2}, seed);
    EXPECT_EQ(s.whole_folds[0].size(), 5u);
    EXPECT_EQ(s.whole_folds[1].size(), 3u);
    EXPECT_EQ(s.whole_folds[2].size(), 2u);
    EXPECT_TRUE(s.partial_folds.empty());
    expect_partition(s, words);
  }
}

TEST(SplitDataset, RejectsBadRatios) {
  const auto words = one_word_per_fold(3, 1);
  EXPECT_THROW(split_dataset(words, {-0.1, 0.6, 0.5}, 1), ArgumentError);
  EXPECT_THROW(split_dataset(words, {0.5, 0.5, 0.5}, 1), ArgumentError);
}

TEST(SplitDataset, PartitionsAndIsReproducibleForAnySeed) {
  const Dataset d = test_support::synthetic_dataset(13);
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 9999ull, 0xFFFFFFFFFFull}) {
    const auto a = split_dataset(d.words, {}, seed);
    const auto b = split_dataset(d.words, {}, seed);
    expect_partition(a, d.words);
    EXPECT_EQ(a.word_ids, b.word_ids);
    EXPECT_EQ(a.glyph_counts, b.glyph_counts);
    EXPECT_EQ(a.seed, seed);
  }
}

TEST(SplitDataset, PartialFoldsCloseTheDeficit) {
  // 10 equal folds cannot be cut in thirds whole; one fold gets scrambled.
  const Dataset d = test_support::synthetic_dataset(12);
  const auto s = split_dataset(d.words, {}, 5);
  EXPECT_EQ(s.partial_folds.size(), 1u);
  const double third = static_cast<double>(d.glyphs.size()) / 3.0;
  for (std::size_t g = 0; g < 3; ++g) {
    EXPECT_NEAR(static_cast<double>(s.glyph_counts[g]), third, 0.05 * third);
  }
}

TEST(SplitDataset, JsonRoundTrip) {
  const Dataset d = test_support::synthetic_dataset();
  const auto s = split_dataset(d.words, {0.7, 0.15, 0.15}, 11);
  const auto back = split_from_json(split_to_json(s));
  EXPECT_EQ(back.word_ids, s.word_ids);
  EXPECT_EQ(back.glyph_counts, s.glyph_counts);
  EXPECT_EQ(back.whole_folds, s.whole_folds);
  EXPECT_EQ(back.partial_folds, s.partial_folds);
  EXPECT_EQ(back.seed, s.seed);
  EXPECT_DOUBLE_EQ(back.ratios.train, 0.7);
}

TEST(SplitDataset, WordsInFollowsSplitOrder) {
  const Dataset d = test_support::synthetic_dataset();
  const auto s = split_dataset(d.words, {}, 2);
  const auto test_words = words_in(d, s, Group::test);
  ASSERT_EQ(test_words.size(), s[Group::test].size());
  for (std::size_t i = 0; i < test_words.size(); ++i) {
    EXPECT_EQ(test_words[i]->word_id, s[Group::test][i]);
  }
}
