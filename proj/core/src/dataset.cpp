#include "ocrhmm/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace ocrhmm {
namespace {

constexpr std::size_t kHeaderFields = 6;
constexpr std::size_t kFieldCount = kHeaderFields + Bitmap::kPixels;

int parse_int(std::string_view field, std::size_t line, const char* name) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(line, std::string("bad ") + name + " '" + std::string(field) + "'");
  }
  return value;
}

Glyph parse_line(std::string_view text, std::size_t line) {
  std::vector<std::string_view> fields;
  fields.reserve(kFieldCount + 1);
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = text.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(text.substr(start));
      break;
    }
    fields.push_back(text.substr(start, tab - start));
    start = tab + 1;
  }
  if (fields.size() == kFieldCount + 1 && fields.back().empty()) fields.pop_back();
  if (fields.size() != kFieldCount) {
    throw ParseError(line, "expected " + std::to_string(kFieldCount) + " fields, got " +
                               std::to_string(fields.size()));
  }

  Glyph g;
  g.id = parse_int(fields[0], line, "id");
  if (fields[1].size() != 1 || !is_letter_char(fields[1][0])) {
    throw ParseError(line, "letter '" + std::string(fields[1]) + "' outside a-z");
  }
  g.letter = letter_from_char(fields[1][0]);
  const int next = parse_int(fields[2], line, "next_id");
  if (next != -1) g.next_id = next;
  g.word_id = parse_int(fields[3], line, "word_id");
  g.position = parse_int(fields[4], line, "position");
  g.fold = parse_int(fields[5], line, "fold");
  if (g.fold < 0 || g.fold > 9) {
    throw ParseError(line, "fold " + std::to_string(g.fold) + " outside 0-9");
  }
  if (g.position < 1) throw ParseError(line, "position must be >= 1");
  for (int i = 0; i < Bitmap::kPixels; ++i) {
    const auto f = fields[kHeaderFields + static_cast<std::size_t>(i)];
    if (f == "1") {
      g.bitmap.set_pixel(i);
    } else if (f != "0") {
      throw ParseError(line, "pixel " + std::to_string(i) + " value '" + std::string(f) +
                                 "' is not binary");
    }
  }
  return g;
}

std::string read_possibly_gzipped(const std::filesystem::path& path) {
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) {
    throw Error("cannot open dataset '" + path.string() + "'");
  }
  std::string content;
  std::array<char, 1 << 16> buffer;
  int got = 0;
  while ((got = gzread(file, buffer.data(), static_cast<unsigned>(buffer.size()))) > 0) {
    content.append(buffer.data(), static_cast<std::size_t>(got));
  }
  int errnum = 0;
  const char* msg = gzerror(file, &errnum);
  const std::string err = (errnum != Z_OK && errnum != Z_STREAM_END) ? msg : "";
  gzclose(file);
  if (got < 0 || !err.empty()) throw Error("read error in '" + path.string() + "': " + err);
  return content;
}

}  // namespace

std::string Dataset::spelling(const WordSequence& word) const {
  std::string s;
  s.reserve(word.size());
  for (std::size_t idx : word.glyphs) s.push_back(letter_char(glyphs[idx].letter));
  return s;
}

std::size_t Dataset::distinct_spellings() const {
  std::set<std::string> seen;
  for (const auto& w : words) seen.insert(spelling(w));
  return seen.size();
}

std::vector<int> Dataset::folds() const {
  std::set<int> seen;
  for (const auto& g : glyphs) seen.insert(g.fold);
  return {seen.begin(), seen.end()};
}

Dataset parse_dataset(std::istream& source) {
  Dataset ds;
  std::string text;
  std::size_t line = 0;
  while (std::getline(source, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    ds.glyphs.push_back(parse_line(text, line));
  }
  ds.words = assemble_words(ds.glyphs);
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::istringstream in(read_possibly_gzipped(path));
  return parse_dataset(in);
}

void write_dataset(std::ostream& out, std::span<const Glyph> glyphs) {
  for (const auto& g : glyphs) {
    out << g.id << '\t' << letter_char(g.letter) << '\t' << (g.next_id ? *g.next_id : -1) << '\t'
        << g.word_id << '\t' << g.position << '\t' << g.fold;
    for (int i = 0; i < Bitmap::kPixels; ++i) out << '\t' << (g.bitmap.pixel(i) ? '1' : '0');
    out << '\n';
  }
}

std::vector<WordSequence> assemble_words(std::span<const Glyph> glyphs) {
  std::vector<WordSequence> words;
  bool open = false;
  for (std::size_t i = 0; i < glyphs.size(); ++i) {
    const Glyph& g = glyphs[i];
    if (!open || words.back().word_id != g.word_id) {
      words.push_back(WordSequence{g.word_id, g.fold, {}});
      open = true;
    }
    WordSequence& w = words.back();
    const int expected = static_cast<int>(w.glyphs.size()) + 1;
    if (g.position != expected) {
      throw StructuralError("word " + std::to_string(g.word_id) + ": glyph " +
                            std::to_string(g.id) + " has position " +
                            std::to_string(g.position) + ", expected " +
                            std::to_string(expected));
    }
    if (g.fold != w.fold) {
      throw StructuralError("word " + std::to_string(g.word_id) + " spans folds " +
                            std::to_string(w.fold) + " and " + std::to_string(g.fold));
    }
    w.glyphs.push_back(i);
    if (!g.next_id) open = false;
  }
  return words;
}

}  // namespace ocrhmm
