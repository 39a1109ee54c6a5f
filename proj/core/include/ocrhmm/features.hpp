#pragma once

#include <array>
#include <atomic>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ocrhmm/bitmap.hpp"
#include "ocrhmm/dataset.hpp"
#include "ocrhmm/imageops.hpp"

namespace ocrhmm {

/// The eight feature combinations:
///   a  centroid x, centroid y, eccentricity                          (3)
///   b  a + holes, objects                                            (5)
///   c  b + four quadrant counts                                      (9)
///   d  c + perimeter, major axis, minor axis, orientation           (13)
///   e  d + 128 deslanted pixels                                    (141)
///   f  128 raw pixels                                              (128)
///   g  128 deslanted pixels                                        (128)
///   h  g + orientation                                             (129)
/// Scalar statistics always come from the original bitmap.
enum class FeatureSet { a, b, c, d, e, f, g, h };

inline constexpr std::array<FeatureSet, 8> kAllFeatureSets{
    FeatureSet::a, FeatureSet::b, FeatureSet::c, FeatureSet::d,
    FeatureSet::e, FeatureSet::f, FeatureSet::g, FeatureSet::h};

char feature_set_tag(FeatureSet set);
std::size_t feature_dimension(FeatureSet set);
/// Throws ArgumentError for anything but a single letter a-h.
FeatureSet parse_feature_set(std::string_view tag);

/// Row-major per-glyph feature vectors.
struct FeatureMatrix {
  FeatureSet set = FeatureSet::a;
  std::size_t dim = 0;
  std::vector<double> values;
  std::vector<std::size_t> glyph_order;  ///< index into the glyph collection per row

  std::size_t rows() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }
};

/// Orientation feature value: (-90, 90] mapped onto [0, 180).
double orientation_feature(double orientation_degrees);

/// Builds feature rows for a fixed glyph collection. Per-glyph analysis
/// (ellipse, region statistics, deslanted bitmap) is computed on first use
/// and cached; the cache fills safely from concurrent callers.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(std::span<const Glyph> glyphs);
  ~FeatureExtractor();
  FeatureExtractor(const FeatureExtractor&) = delete;
  FeatureExtractor& operator=(const FeatureExtractor&) = delete;

  FeatureMatrix extract(FeatureSet set, std::span<const std::size_t> glyph_indices) const;
  FeatureMatrix extract(FeatureSet set) const;

  struct Analysis {
    std::optional<EllipseStats> ellipse;  ///< empty for a blank glyph
    RegionStats region;
    Bitmap rotated;
  };
  const Analysis& analysis(std::size_t glyph) const;

  /// Glyphs seen so far with no active pixel.
  std::size_t degenerate_glyphs() const { return degenerate_.load(); }

 private:
  struct Slot;
  std::span<const Glyph> glyphs_;
  std::unique_ptr<Slot[]> slots_;
  mutable std::atomic<std::size_t> degenerate_{0};
};

/// Convenience: all glyphs, in order.
FeatureMatrix extract_features(std::span<const Glyph> glyphs, FeatureSet set);

/// Column-wise z-scoring fitted on one matrix and applied to others.
/// Constant columns are centred but not scaled.
class Standardizer {
 public:
  static Standardizer fit(const FeatureMatrix& reference);
  void apply(FeatureMatrix& m) const;

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

/// CSV with header `glyph_id,letter,word_id,f1..fD`.
void write_feature_csv(std::ostream& out, const FeatureMatrix& m, std::span<const Glyph> glyphs);

}  // namespace ocrhmm
