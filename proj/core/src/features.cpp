#include "ocrhmm/features.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "ocrhmm/log.hpp"

namespace ocrhmm {

struct FeatureExtractor::Slot {
  std::once_flag once;
  Analysis value;
};

char feature_set_tag(FeatureSet set) { return static_cast<char>('a' + static_cast<int>(set)); }

std::size_t feature_dimension(FeatureSet set) {
  switch (set) {
    case FeatureSet::a: return 3;
    case FeatureSet::b: return 5;
    case FeatureSet::c: return 9;
    case FeatureSet::d: return 13;
    case FeatureSet::e: return 141;
    case FeatureSet::f: return 128;
    case FeatureSet::g: return 128;
    case FeatureSet::h: return 129;
  }
  return 0;
}

FeatureSet parse_feature_set(std::string_view tag) {
  if (tag.size() == 1 && tag[0] >= 'a' && tag[0] <= 'h') {
    return static_cast<FeatureSet>(tag[0] - 'a');
  }
  throw ArgumentError("unknown feature set '" + std::string(tag) + "'");
}

double orientation_feature(double orientation_degrees) {
  return orientation_degrees < 0.0 ? orientation_degrees + 180.0 : orientation_degrees;
}

FeatureExtractor::FeatureExtractor(std::span<const Glyph> glyphs)
    : glyphs_(glyphs), slots_(std::make_unique<Slot[]>(glyphs.size())) {}

FeatureExtractor::~FeatureExtractor() = default;

const FeatureExtractor::Analysis& FeatureExtractor::analysis(std::size_t glyph) const {
  if (glyph >= glyphs_.size()) throw ArgumentError("glyph index out of range");
  Slot& slot = slots_[glyph];
  std::call_once(slot.once, [&] {
    const Bitmap& bm = glyphs_[glyph].bitmap;
    Analysis a;
    a.region = region_stats(bm);
    if (bm.empty()) {
      ++degenerate_;
      log::warn("glyph " + std::to_string(glyphs_[glyph].id) +
                " has no active pixel; using an all-zero feature row");
    } else {
      a.ellipse = ellipse_stats(bm);
      a.rotated = rotate_upright(bm, a.ellipse->orientation);
    }
    slot.value = std::move(a);
  });
  return slot.value;
}

FeatureMatrix FeatureExtractor::extract(FeatureSet set,
                                        std::span<const std::size_t> glyph_indices) const {
  FeatureMatrix m;
  m.set = set;
  m.dim = feature_dimension(set);
  m.values.assign(glyph_indices.size() * m.dim, 0.0);
  m.glyph_order.assign(glyph_indices.begin(), glyph_indices.end());

  for (std::size_t i = 0; i < glyph_indices.size(); ++i) {
    const std::size_t gi = glyph_indices[i];
    const Analysis& a = analysis(gi);
    auto row = m.row(i);
    if (!a.ellipse) continue;  // degenerate glyph keeps the zero row
    const EllipseStats& e = *a.ellipse;
    const RegionStats& r = a.region;
    std::size_t k = 0;
    auto push = [&](double v) { row[k++] = v; };
    auto push_pixels = [&](const Bitmap& bm) {
      for (int p = 0; p < Bitmap::kPixels; ++p) push(bm.pixel(p) ? 1.0 : 0.0);
    };

    switch (set) {
      case FeatureSet::f:
        push_pixels(glyphs_[gi].bitmap);
        break;
      case FeatureSet::g:
        push_pixels(a.rotated);
        break;
      case FeatureSet::h:
        push_pixels(a.rotated);
        push(orientation_feature(e.orientation));
        break;
      default: {
        push(e.centroid_x);
        push(e.centroid_y);
        push(e.eccentricity);
        if (set == FeatureSet::a) break;
        push(r.hole_count);
        push(r.object_count);
        if (set == FeatureSet::b) break;
        for (int q : r.quadrant_counts) push(q);
        if (set == FeatureSet::c) break;
        push(r.perimeter);
        push(e.major_axis);
        push(e.minor_axis);
        push(orientation_feature(e.orientation));
        if (set == FeatureSet::d) break;
        push_pixels(a.rotated);
        break;
      }
    }
  }
  return m;
}

FeatureMatrix FeatureExtractor::extract(FeatureSet set) const {
  std::vector<std::size_t> all(glyphs_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return extract(set, all);
}

FeatureMatrix extract_features(std::span<const Glyph> glyphs, FeatureSet set) {
  return FeatureExtractor(glyphs).extract(set);
}

Standardizer Standardizer::fit(const FeatureMatrix& reference) {
  Standardizer s;
  const std::size_t d = reference.dim;
  const std::size_t n = reference.rows();
  s.mean_.assign(d, 0.0);
  s.scale_.assign(d, 1.0);
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = reference.row(i);
    for (std::size_t j = 0; j < d; ++j) s.mean_[j] += row[j];
  }
  for (double& m : s.mean_) m /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = reference.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double dv = row[j] - s.mean_[j];
      var[j] += dv * dv;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    s.scale_[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply(FeatureMatrix& m) const {
  if (m.dim != mean_.size()) throw ArgumentError("standardizer dimension mismatch");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    for (std::size_t j = 0; j < m.dim; ++j) row[j] = (row[j] - mean_[j]) / scale_[j];
  }
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& m, std::span<const Glyph> glyphs) {
  out << "glyph_id,letter,word_id";
  for (std::size_t j = 0; j < m.dim; ++j) out << ",f" << (j + 1);
  out << '\n';
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const Glyph& g = glyphs[m.glyph_order[i]];
    out << g.id << ',' << letter_char(g.letter) << ',' << g.word_id;
    for (double v : m.row(i)) out << ',' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace ocrhmm
