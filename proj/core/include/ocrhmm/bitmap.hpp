#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <string>
#include <string_view>

namespace ocrhmm {

/// 8 columns x 16 rows binary glyph, stored row-major (index = row * 8 + col).
class Bitmap {
 public:
  static constexpr int kCols = 8;
  static constexpr int kRows = 16;
  static constexpr int kPixels = kCols * kRows;

  Bitmap() = default;

  bool at(int col, int row) const { return bits_[index(col, row)]; }
  void set(int col, int row, bool on = true) { bits_[index(col, row)] = on; }

  bool pixel(int idx) const { return bits_[static_cast<std::size_t>(idx)]; }
  void set_pixel(int idx, bool on = true) { bits_[static_cast<std::size_t>(idx)] = on; }

  int count() const { return static_cast<int>(bits_.count()); }
  bool empty() const { return bits_.none(); }

  /// Two 64-bit words; pixel i lives in word i / 64, bit i % 64.
  std::array<std::uint64_t, 2> words() const;

  /// Parses 16 lines of 8 characters, '#' (or '1') on and '.' (or '0') off.
  /// Shorter input is padded with background; used for fixtures.
  static Bitmap from_text(std::string_view text);

  /// Rows of '.'/'#' separated by newlines.
  std::string to_text() const;

  friend bool operator==(const Bitmap&, const Bitmap&) = default;

 private:
  static std::size_t index(int col, int row) {
    return static_cast<std::size_t>(row * kCols + col);
  }

  std::bitset<kPixels> bits_;
};

}  // namespace ocrhmm
