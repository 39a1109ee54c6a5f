#pragma once

// Reference implementations written independently of the library, used by
// the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "ocrhmm/hmm.hpp"
#include "ocrhmm/imageops.hpp"
#include "ocrhmm/neural.hpp"
#include "ocrhmm/rng.hpp"

namespace ocrhmm::test_support {

// Plain double loop over all cells, x = col + 1, y = row + 1.
inline PixelMoments brute_moments(const Bitmap& b) {
  PixelMoments m;
  for (int row = 0; row < Bitmap::kRows; ++row) {
    for (int col = 0; col < Bitmap::kCols; ++col) {
      if (!b.at(col, row)) continue;
      const std::int64_t x = col + 1;
      const std::int64_t y = row + 1;
      ++m.count;
      m.sum_x += x;
      m.sum_y += y;
      m.sum_xx += x * x;
      m.sum_yy += y * y;
      m.sum_xy += x * y;
    }
  }
  return m;
}

// Padded background components (4-connected) via union-find, minus one.
inline int union_find_holes(const Bitmap& b) {
  constexpr int W = Bitmap::kCols + 2;
  constexpr int H = Bitmap::kRows + 2;
  std::vector<int> parent(W * H);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  auto background = [&](int c, int r) {
    return c == 0 || r == 0 || c == W - 1 || r == H - 1 || !b.at(c - 1, r - 1);
  };
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      if (!background(c, r)) continue;
      if (c + 1 < W && background(c + 1, r)) parent[find(r * W + c)] = find(r * W + c + 1);
      if (r + 1 < H && background(c, r + 1)) parent[find(r * W + c)] = find((r + 1) * W + c);
    }
  }
  int roots = 0;
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) roots += background(c, r) && find(r * W + c) == r * W + c;
  }
  return roots - 1;
}

// Forward pass written out by hand: tanh hidden layer, logistic output,
// mean squared error. Same parameter layout as BinaryNetwork.
inline double plain_network_mse(std::size_t d, std::size_t h, const std::vector<double>& w,
                                const FeatureMatrix& x, const std::vector<double>& t) {
  double total = 0.0;
  for (std::size_t n = 0; n < x.rows(); ++n) {
    double a = w[h * d + 2 * h];
    for (std::size_t j = 0; j < h; ++j) {
      double z = w[h * d + j];
      for (std::size_t i = 0; i < d; ++i) z += w[j * d + i] * x.row(n)[i];
      a += w[h * d + h + j] * std::tanh(z);
    }
    const double y = 1.0 / (1.0 + std::exp(-a));
    total += (y - t[n]) * (y - t[n]);
  }
  return total / static_cast<double>(x.rows());
}

// ||g - fd|| / ||(g + fd) / 2|| for the analytic gradient at one random
// weight draw, against central differences of plain_network_mse.
inline double gradient_relative_error(std::size_t d, std::size_t h, Rng& rng, std::size_t samples = 12) {
  FeatureMatrix x{FeatureSet::a, d, {}, {}};
  for (std::size_t i = 0; i < samples * d; ++i) x.values.push_back(rng.uniform(-1, 1));
  std::vector<double> t(samples);
  for (auto& v : t) v = static_cast<double>(rng.index(2));
  std::vector<double> w(BinaryNetwork::parameter_count(d, h));
  for (auto& v : w) v = rng.uniform(-1, 1);
  std::vector<double> g(w.size());
  network_mse(d, h, w, x, t, g);
  double diff2 = 0.0, norm2 = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double eps = 1e-6;
    auto wp = w, wm = w;
    wp[k] += eps;
    wm[k] -= eps;
    const double fd = (plain_network_mse(d, h, wp, x, t) - plain_network_mse(d, h, wm, x, t)) / (2 * eps);
    diff2 += (fd - g[k]) * (fd - g[k]);
    norm2 += (fd + g[k]) * (fd + g[k]) / 4;
  }
  return norm2 > 0 ? std::sqrt(diff2 / norm2) : std::sqrt(diff2);
}

// ---------------------------------------------------------------------------
// Exhaustive decoding

inline double log_or_neg_inf(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

struct BruteDecode {
  std::vector<Letter> letters;
  double score = -std::numeric_limits<double>::infinity();
};

// Scores each path over the active letters with a left fold in time order,
// the same addition order the recursion uses, so ties are exact. Paths are
// visited with the last letter most significant, so keeping the first strict
// best picks the smallest last letter, then the smallest second-to-last, and
// so on back to the first.
inline BruteDecode brute_force_decode(const HmmModel& m, const WordEmissions& e, DecodeMode mode,
                                      const std::vector<Letter>& active) {
  const std::size_t L = e.length;
  const std::size_t n = active.size();
  std::size_t total = 1;
  for (std::size_t t = 0; t < L; ++t) total *= n;
  BruteDecode best;
  std::vector<Letter> path(L);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t t = 0; t < L; ++t) {
      path[t] = active[c % n];
      c /= n;
    }
    double s = log_or_neg_inf(m.initial[path[0]]) + e(0, path[0]);
    for (std::size_t t = 1; t < L; ++t) {
      const bool last = mode == DecodeMode::final_transition && t == L - 1;
      const auto& a = last ? *m.final_transition : m.transition;
      s = s + log_or_neg_inf(a[path[t - 1]][path[t]]) + e(t, path[t]);
    }
    if (mode == DecodeMode::end_state || (mode == DecodeMode::final_transition && L == 1)) {
      const auto& end = m.end_model == EndModel::marginal ? m.final_dist : m.end_conditional;
      s += log_or_neg_inf(end[path[L - 1]]);
    }
    if (s > best.score) {
      best.score = s;
      best.letters = path;
    }
  }
  return best;
}

struct DecodeInstance {
  HmmModel model;
  WordEmissions emissions;
  std::vector<Letter> active;  ///< ascending
};

// Up to 6 active letters and words of length 1 to 4; a fifth of all
// probabilities are zero. Half of the instances are built for exact ties:
// model entries are 0 or 1 and log emissions are small integers, so every
// path score is an exactly representable sum and equal paths compare equal
// whatever the addition order. The other half draws from a continuum.
inline DecodeInstance random_decode_instance(Rng& rng) {
  const bool discrete = rng.uniform() < 0.5;
  auto draw = [&] {
    if (rng.uniform() < 0.2) return 0.0;
    return discrete ? 1.0 : rng.uniform(0.01, 1.0);
  };
  auto draw_log_emission = [&] {
    if (rng.uniform() < 0.2) return -std::numeric_limits<double>::infinity();
    return discrete ? -static_cast<double>(1 + rng.index(3)) : std::log(rng.uniform(0.01, 1.0));
  };

  DecodeInstance in;
  std::vector<Letter> all(kNumLetters);
  std::iota(all.begin(), all.end(), Letter{0});
  rng.shuffle(std::span<Letter>(all));
  const std::size_t n = 1 + rng.index(6);
  in.active.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
  std::sort(in.active.begin(), in.active.end());

  HmmModel& m = in.model;
  TransitionMatrix last{};
  for (Letter i : in.active) {
    m.initial[i] = draw();
    m.final_dist[i] = draw();
    m.end_conditional[i] = draw();
    for (Letter j : in.active) {
      m.transition[i][j] = draw();
      last[i][j] = draw();
    }
  }
  m.final_transition = last;
  m.end_model = rng.uniform() < 0.5 ? EndModel::marginal : EndModel::conditional;

  const std::size_t L = 1 + rng.index(4);
  in.emissions.length = L;
  in.emissions.log_values.assign(L * kNumLetters, -std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < L; ++t) {
    for (Letter l : in.active) in.emissions.log_values[t * kNumLetters + l] = draw_log_emission();
  }
  return in;
}

}  // namespace ocrhmm::test_support
