#include "ocrhmm/emission.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "ocrhmm/log.hpp"

namespace ocrhmm {

EmissionMatrix normalize_emissions(const LetterMatrix& raw) {
  EmissionMatrix out{raw, {}};
  for (int r = 0; r < kNumLetters; ++r) {
    auto row = out.probs.row(r);
    double sum = 0.0;
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ArgumentError("emission row " + std::string(1, letter_char(r)) +
                            " has a negative or non-finite entry");
      }
      sum += v;
    }
    if (sum == 0.0) {
      if (!row.empty()) out.zero_rows.push_back(static_cast<Letter>(r));
      continue;
    }
    for (double& v : row) v /= sum;
  }
  if (!out.zero_rows.empty()) {
    log::debug(std::to_string(out.zero_rows.size()) + " emission rows have no mass");
  }
  return out;
}

EmissionMatrix normalize_log_emissions(const LetterMatrix& log_raw) {
  EmissionMatrix out{LetterMatrix(log_raw.samples()), {}};
  for (int r = 0; r < kNumLetters; ++r) {
    const auto in = log_raw.row(r);
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : in) {
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw ArgumentError("log emission row " + std::string(1, letter_char(r)) +
                            " has a NaN or +inf entry");
      }
      peak = std::max(peak, v);
    }
    if (peak == -std::numeric_limits<double>::infinity()) {
      if (!in.empty()) out.zero_rows.push_back(static_cast<Letter>(r));
      continue;
    }
    double sum = 0.0;
    for (double v : in) sum += std::exp(v - peak);
    const double log_norm = peak + std::log(sum);
    auto row = out.probs.row(r);
    for (std::size_t j = 0; j < in.size(); ++j) row[j] = std::exp(in[j] - log_norm);
  }
  return out;
}

std::vector<Letter> classify_argmax(const LetterMatrix& raw) {
  std::vector<Letter> out(raw.samples(), 0);
  for (std::size_t j = 0; j < raw.samples(); ++j) {
    int best = 0;
    for (int r = 1; r < kNumLetters; ++r) {
      if (raw(r, j) > raw(best, j)) best = r;
    }
    out[j] = static_cast<Letter>(best);
  }
  return out;
}

std::array<double, kNumLetters> class_priors(std::span<const Letter> labels) {
  std::array<double, kNumLetters> p{};
  for (Letter l : labels) p[l] += 1.0;
  if (!labels.empty()) {
    for (double& v : p) v /= static_cast<double>(labels.size());
  }
  return p;
}

void write_emission_csv(std::ostream& out, const EmissionMatrix& m) {
  out << "letter";
  for (std::size_t j = 0; j < m.samples(); ++j) out << ",s" << (j + 1);
  out << '\n';
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (int r = 0; r < kNumLetters; ++r) {
    out << letter_char(r);
    for (double v : m.probs.row(r)) out << ',' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace ocrhmm
