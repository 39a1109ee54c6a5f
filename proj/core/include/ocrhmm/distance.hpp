#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ocrhmm/features.hpp"

namespace ocrhmm {

/// Euclidean distances from query rows to a fixed reference set.
///
/// Columns that hold only 0/1 in both the reference and the query matrices
/// are bit-packed and compared by popcount; for those columns the squared
/// difference equals the xor bit, so results are exact. The remaining
/// columns are compared densely.
class DistanceEngine {
 public:
  DistanceEngine(const FeatureMatrix& reference, const FeatureMatrix& queries);

  std::size_t reference_size() const { return n_ref_; }
  std::size_t query_size() const { return n_query_; }
  std::size_t dimension() const { return dim_; }
  /// True when every column is binary; squared distances are then integers.
  bool all_binary() const { return dense_cols_.empty(); }

  /// Squared Euclidean distance from query `q` to every reference row.
  void squared_distances(std::size_t q, std::span<double> out) const;

  /// Max-coordinate (Chebyshev) distance from query `q` to every reference row.
  void chebyshev_distances(std::size_t q, std::span<double> out) const;

  /// Hamming distances; only valid when all_binary().
  void hamming_distances(std::size_t q, std::span<std::uint32_t> out) const;

 private:
  struct Packed {
    std::vector<double> dense;         // rows x dense_cols
    std::vector<std::uint64_t> words;  // rows x n_words
  };
  Packed pack(const FeatureMatrix& m) const;

  std::size_t dim_ = 0;
  std::size_t n_ref_ = 0;
  std::size_t n_query_ = 0;
  std::vector<std::size_t> dense_cols_;
  std::vector<std::size_t> binary_cols_;
  std::size_t n_words_ = 0;
  Packed ref_;
  Packed query_;
};

}  // namespace ocrhmm
