#include "ocrhmm/bitmap.hpp"

namespace ocrhmm {

std::array<std::uint64_t, 2> Bitmap::words() const {
  std::array<std::uint64_t, 2> out{0, 0};
  for (int i = 0; i < kPixels; ++i) {
    if (bits_[static_cast<std::size_t>(i)]) out[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return out;
}

Bitmap Bitmap::from_text(std::string_view text) {
  Bitmap bm;
  int row = 0;
  int col = 0;
  for (char c : text) {
    if (c == '\n') {
      if (col > 0) ++row;
      col = 0;
      continue;
    }
    if (c == ' ' || c == '\r' || c == '\t') continue;
    if (row >= kRows || col >= kCols) continue;
    if (c == '#' || c == '1') bm.set(col, row);
    ++col;
  }
  return bm;
}

std::string Bitmap::to_text() const {
  std::string out;
  out.reserve(kRows * (kCols + 1));
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) out.push_back(at(c, r) ? '#' : '.');
    out.push_back('\n');
  }
  return out;
}

}  // namespace ocrhmm
