#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ocrhmm {

inline constexpr int kNumLetters = 26;

/// Alphabet index, 0 = 'a' ... 25 = 'z'.
using Letter = std::uint8_t;

inline char letter_char(int letter) { return static_cast<char>('a' + letter); }

inline bool is_letter_char(char c) { return c >= 'a' && c <= 'z'; }

inline Letter letter_from_char(char c) { return static_cast<Letter>(c - 'a'); }

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input record. line() is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Inconsistent word / sample structure.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument to an operation.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Training could not produce a usable model.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Bitmap has no active pixel where one is required.
class EmptyRegionError : public Error {
 public:
  using Error::Error;
};

}  // namespace ocrhmm
