#include "ocrhmm/distance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ocrhmm {
namespace {

bool column_is_binary(const FeatureMatrix& m, std::size_t col) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double v = m.values[i * m.dim + col];
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

}  // namespace

DistanceEngine::DistanceEngine(const FeatureMatrix& reference, const FeatureMatrix& queries)
    : dim_(reference.dim), n_ref_(reference.rows()), n_query_(queries.rows()) {
  if (queries.dim != reference.dim) {
    throw ArgumentError("feature dimension mismatch: reference " + std::to_string(reference.dim) +
                        ", query " + std::to_string(queries.dim));
  }
  for (std::size_t c = 0; c < dim_; ++c) {
    if (column_is_binary(reference, c) && column_is_binary(queries, c)) {
      binary_cols_.push_back(c);
    } else {
      dense_cols_.push_back(c);
    }
  }
  n_words_ = (binary_cols_.size() + 63) / 64;
  ref_ = pack(reference);
  query_ = pack(queries);
}

DistanceEngine::Packed DistanceEngine::pack(const FeatureMatrix& m) const {
  Packed p;
  const std::size_t rows = m.rows();
  p.dense.resize(rows * dense_cols_.size());
  p.words.assign(rows * n_words_, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = m.row(i);
    for (std::size_t k = 0; k < dense_cols_.size(); ++k) {
      p.dense[i * dense_cols_.size() + k] = row[dense_cols_[k]];
    }
    for (std::size_t k = 0; k < binary_cols_.size(); ++k) {
      if (row[binary_cols_[k]] != 0.0) {
        p.words[i * n_words_ + k / 64] |= std::uint64_t{1} << (k % 64);
      }
    }
  }
  return p;
}

void DistanceEngine::squared_distances(std::size_t q, std::span<double> out) const {
  if (out.size() != n_ref_) throw ArgumentError("distance buffer size mismatch");
  const std::size_t nd = dense_cols_.size();
  const double* qd = query_.dense.data() + q * nd;
  const std::uint64_t* qw = query_.words.data() + q * n_words_;
  for (std::size_t j = 0; j < n_ref_; ++j) {
    const double* rd = ref_.dense.data() + j * nd;
    double acc = 0.0;
    for (std::size_t k = 0; k < nd; ++k) {
      const double diff = qd[k] - rd[k];
      acc += diff * diff;
    }
    const std::uint64_t* rw = ref_.words.data() + j * n_words_;
    int bits = 0;
    for (std::size_t w = 0; w < n_words_; ++w) bits += std::popcount(qw[w] ^ rw[w]);
    out[j] = acc + static_cast<double>(bits);
  }
}

void DistanceEngine::chebyshev_distances(std::size_t q, std::span<double> out) const {
  if (out.size() != n_ref_) throw ArgumentError("distance buffer size mismatch");
  const std::size_t nd = dense_cols_.size();
  const double* qd = query_.dense.data() + q * nd;
  const std::uint64_t* qw = query_.words.data() + q * n_words_;
  for (std::size_t j = 0; j < n_ref_; ++j) {
    const double* rd = ref_.dense.data() + j * nd;
    double acc = 0.0;
    for (std::size_t k = 0; k < nd; ++k) acc = std::max(acc, std::abs(qd[k] - rd[k]));
    const std::uint64_t* rw = ref_.words.data() + j * n_words_;
    for (std::size_t w = 0; w < n_words_; ++w) {
      if ((qw[w] ^ rw[w]) != 0) {
        acc = std::max(acc, 1.0);
        break;
      }
    }
    out[j] = acc;
  }
}

void DistanceEngine::hamming_distances(std::size_t q, std::span<std::uint32_t> out) const {
  if (!all_binary()) throw ArgumentError("hamming distances need all-binary features");
  if (out.size() != n_ref_) throw ArgumentError("distance buffer size mismatch");
  const std::uint64_t* qw = query_.words.data() + q * n_words_;
  for (std::size_t j = 0; j < n_ref_; ++j) {
    const std::uint64_t* rw = ref_.words.data() + j * n_words_;
    std::uint32_t bits = 0;
    for (std::size_t w = 0; w < n_words_; ++w) {
      bits += static_cast<std::uint32_t>(std::popcount(qw[w] ^ rw[w]));
    }
    out[j] = bits;
  }
}

}  // namespace ocrhmm
