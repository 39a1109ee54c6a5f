#pragma once

#include <array>
#include <cstdint>

#include "ocrhmm/bitmap.hpp"

namespace ocrhmm {

// Pixel centres sit at integer coordinates: x = column 1..8, y = row 1..16,
// y growing downward. Angles are reported with y flipped to the usual
// mathematical orientation (counterclockwise positive).

/// Exact integer moment sums over active pixels.
struct PixelMoments {
  std::int64_t count = 0;
  std::int64_t sum_x = 0;
  std::int64_t sum_y = 0;
  std::int64_t sum_xx = 0;
  std::int64_t sum_yy = 0;
  std::int64_t sum_xy = 0;

  // count^2 times the central moments; exact.
  std::int64_t scaled_mu20() const { return count * sum_xx - sum_x * sum_x; }
  std::int64_t scaled_mu02() const { return count * sum_yy - sum_y * sum_y; }
  std::int64_t scaled_mu11() const { return count * sum_xy - sum_x * sum_y; }

  friend bool operator==(const PixelMoments&, const PixelMoments&) = default;
};

struct EllipseStats {
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  double mu20 = 0.0;  ///< mean squared x deviation
  double mu02 = 0.0;  ///< mean squared y deviation
  double mu11 = 0.0;  ///< mean cross deviation, image (y-down) axes
  double orientation = 0.0;  ///< degrees in (-90, 90], major axis vs horizontal
  double major_axis = 0.0;
  double minor_axis = 0.0;
  double eccentricity = 0.0;
};

struct RegionStats {
  int object_count = 0;
  int hole_count = 0;
  int perimeter = 0;
  std::array<int, 4> quadrant_counts{};  ///< TL, TR, BL, BR
  int active_pixels = 0;
};

/// Row-wise accumulation of the raw moment sums.
PixelMoments pixel_moments(const Bitmap& bitmap);

/// Equivalent ellipse from exact moment sums. Axis lengths are
/// 4 * sqrt(eigenvalue) of the pixel-coordinate covariance. Equal
/// eigenvalues with zero cross moment report orientation 0.
/// Throws EmptyRegionError when moments.count == 0.
EllipseStats ellipse_from_moments(const PixelMoments& moments);

/// ellipse_from_moments(pixel_moments(bitmap)).
EllipseStats ellipse_stats(const Bitmap& bitmap);

/// Rotates by (90 - orientation) degrees about the centroid so the major
/// axis points up. Inverse mapping with nearest-neighbour sampling (halves
/// round up), clipped to the frame. Empty bitmaps pass through.
Bitmap rotate_upright(const Bitmap& bitmap, double orientation_degrees);

/// Foreground components at 4- or 8-connectivity.
int connected_objects(const Bitmap& bitmap, int connectivity = 8);

/// 4-connected background components of the bitmap padded with one
/// background ring, minus the outer background.
int count_holes(const Bitmap& bitmap);

/// Unit edges between foreground pixels and 4-neighbour background (the
/// frame border counts as background).
int perimeter_length(const Bitmap& bitmap);

/// Active pixels per 4-column x 8-row quadrant: TL, TR, BL, BR.
std::array<int, 4> quadrant_counts(const Bitmap& bitmap);

RegionStats region_stats(const Bitmap& bitmap);

}  // namespace ocrhmm
