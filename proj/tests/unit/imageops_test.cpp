#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "ocrhmm/imageops.hpp"
#include "ocrhmm/rng.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace ocrhmm;

namespace {

Bitmap filled(int col0, int row0, int cols, int rows) {
  Bitmap b;
  for (int r = row0; r < row0 + rows; ++r) {
    for (int c = col0; c < col0 + cols; ++c) b.set(c, r);
  }
  return b;
}

Bitmap ring3x3(int col0 = 2, int row0 = 5) {
  Bitmap b = filled(col0, row0, 3, 3);
  b.set(col0 + 1, row0 + 1, false);
  return b;
}

// Euler number for 8-connected foreground from 2x2 bit-quad counts.
int bit_quad_euler(const Bitmap& b) {
  auto px = [&](int c, int r) {
    return c >= 0 && r >= 0 && c < Bitmap::kCols && r < Bitmap::kRows && b.at(c, r);
  };
  int q1 = 0, q3 = 0, qd = 0;
  for (int r = -1; r < Bitmap::kRows; ++r) {
    for (int c = -1; c < Bitmap::kCols; ++c) {
      const bool a = px(c, r), bb = px(c + 1, r), cc = px(c, r + 1), d = px(c + 1, r + 1);
      const int n = a + bb + cc + d;
      if (n == 1) ++q1;
      if (n == 3) ++q3;
      if (n == 2 && a == d) ++qd;
    }
  }
  return (q1 - q3 - 2 * qd) / 4;
}

}  // namespace

TEST(EllipseStats, SolidFrame) {
  const EllipseStats e = ellipse_stats(filled(0, 0, 8, 16));
  EXPECT_DOUBLE_EQ(e.centroid_x, 4.5);
  EXPECT_DOUBLE_EQ(e.centroid_y, 8.5);
  // discrete variance of 1..n is (n^2 - 1) / 12
  EXPECT_DOUBLE_EQ(e.mu20, 63.0 / 12.0);
  EXPECT_DOUBLE_EQ(e.mu02, 255.0 / 12.0);
  EXPECT_DOUBLE_EQ(e.orientation, 90.0);
  EXPECT_NEAR(e.eccentricity, std::sqrt(1.0 - 63.0 / 255.0), 1e-12);
  EXPECT_NEAR(e.eccentricity, 0.868, 5e-4);
  EXPECT_NEAR(e.major_axis, 4.0 * std::sqrt(255.0 / 12.0), 1e-12);
  EXPECT_NEAR(e.minor_axis, 4.0 * std::sqrt(63.0 / 12.0), 1e-12);
}

TEST(EllipseStats, SquareIsRound) {
  const EllipseStats e = ellipse_stats(filled(0, 0, 8, 8));
  EXPECT_EQ(e.eccentricity, 0.0);
  EXPECT_EQ(e.mu11, 0.0);
  EXPECT_EQ(e.orientation, 0.0);
  EXPECT_EQ(e.major_axis, e.minor_axis);
}

TEST(EllipseStats, DiagonalDescendsToTheRight) {
  Bitmap b;
  for (int i = 0; i < 8; ++i) b.set(i, i);
  const EllipseStats e = ellipse_stats(b);
  // y grows downward, so the stroke points down-right: -45 after the flip.
  EXPECT_NEAR(e.orientation, -45.0, 1e-12);
  EXPECT_NEAR(e.minor_axis, 0.0, 1e-12);
  EXPECT_NEAR(e.eccentricity, 1.0, 1e-12);

  Bitmap anti;
  for (int i = 0; i < 8; ++i) anti.set(i, 7 - i);
  EXPECT_NEAR(ellipse_stats(anti).orientation, 45.0, 1e-12);
}

TEST(EllipseStats, EmptyBitmapThrows) {
  EXPECT_THROW(ellipse_stats(Bitmap{}), EmptyRegionError);
}

TEST(EllipseStats, MatchesBruteForceOnRandomBitmaps) {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const Bitmap b = test_support::random_bitmap(rng, rng.uniform(0.02, 0.9));
    if (b.empty()) continue;
    const PixelMoments m = pixel_moments(b);
    EXPECT_EQ(m, test_support::brute_moments(b));

    // sum (n x - Sx)^2 = n * scaled_mu20, in integers
    std::int64_t dxx = 0, dyy = 0, dxy = 0;
    for (int row = 0; row < Bitmap::kRows; ++row) {
      for (int col = 0; col < Bitmap::kCols; ++col) {
        if (!b.at(col, row)) continue;
        const std::int64_t dx = m.count * (col + 1) - m.sum_x;
        const std::int64_t dy = m.count * (row + 1) - m.sum_y;
        dxx += dx * dx;
        dyy += dy * dy;
        dxy += dx * dy;
      }
    }
    EXPECT_EQ(dxx, m.count * m.scaled_mu20());
    EXPECT_EQ(dyy, m.count * m.scaled_mu02());
    EXPECT_EQ(dxy, m.count * m.scaled_mu11());

    const EllipseStats e = ellipse_stats(b);
    const double n = static_cast<double>(m.count);
    EXPECT_NEAR(e.mu20, static_cast<double>(dxx) / (n * n * n), 1e-12);
    EXPECT_NEAR(e.mu02, static_cast<double>(dyy) / (n * n * n), 1e-12);
    EXPECT_NEAR(e.mu11, static_cast<double>(dxy) / (n * n * n), 1e-12);

    EXPECT_GE(e.eccentricity, 0.0);
    EXPECT_LE(e.eccentricity, 1.0);
    EXPECT_GE(e.major_axis, e.minor_axis);
    EXPECT_GE(e.minor_axis, 0.0);
    EXPECT_GT(e.orientation, -90.0);
    EXPECT_LE(e.orientation, 90.0);
    if (e.major_axis > 0) {
      const double ratio = e.minor_axis / e.major_axis;
      EXPECT_NEAR(e.eccentricity, std::sqrt(1.0 - ratio * ratio), 1e-12);
    }
  }
}

TEST(EllipseStats, MirrorSymmetricShapesHaveNoCrossMoment) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    Bitmap b = test_support::random_bitmap(rng, 0.4);
    for (int row = 0; row < Bitmap::kRows; ++row) {
      for (int col = 0; col < Bitmap::kCols / 2; ++col) b.set(Bitmap::kCols - 1 - col, row, b.at(col, row));
    }
    if (b.empty()) continue;
    EXPECT_EQ(pixel_moments(b).scaled_mu11(), 0);
    EXPECT_EQ(ellipse_stats(b).mu11, 0.0);
  }
}

TEST(RotateUpright, VerticalShapeUnchanged) {
  const Bitmap b = filled(3, 2, 2, 10);
  EXPECT_EQ(ellipse_stats(b).orientation, 90.0);
  EXPECT_EQ(rotate_upright(b, 90.0), b);
}

TEST(RotateUpright, HorizontalBarBecomesVertical) {
  // columns 2..7, row 8 (1-based): centroid (4.5, 8)
  const Bitmap b = filled(1, 7, 6, 1);
  const EllipseStats e = ellipse_stats(b);
  ASSERT_DOUBLE_EQ(e.orientation, 0.0);
  const Bitmap r = rotate_upright(b, e.orientation);
  EXPECT_EQ(r.count(), 6);
  // Quarter turn about (4.5, 8), inverse map: output (x, y) samples source
  // (12.5 - y, x + 3.5). x = 4 reads source row 7.5, which rounds up onto
  // the bar; x = 5 reads 8.5 -> 9, empty. y = 6..11 read source x 6.5..1.5,
  // rounding to 7..2. So column 4, rows 6..11 (indices 3 and 5..10).
  EXPECT_EQ(r, filled(3, 5, 1, 6)) << r.to_text();
  EXPECT_DOUBLE_EQ(ellipse_stats(r).orientation, 90.0);
}

TEST(RotateUpright, SlantedStrokeCanLosePixels) {
  Rng rng(5);
  bool lost = false;
  for (int trial = 0; trial < 200 && !lost; ++trial) {
    const Bitmap b = test_support::random_bitmap(rng, 0.3);
    if (b.empty()) continue;
    lost = rotate_upright(b, ellipse_stats(b).orientation).count() < b.count();
  }
  EXPECT_TRUE(lost);
}

TEST(RotateUpright, EmptyPassesThrough) { EXPECT_EQ(rotate_upright(Bitmap{}, 12.0), Bitmap{}); }

TEST(ConnectedObjects, Examples) {
  EXPECT_EQ(connected_objects(Bitmap{}), 0);
  Bitmap two = filled(0, 0, 2, 2);
  two.set(4, 4);
  two.set(5, 4);
  two.set(4, 5);
  two.set(5, 5);
  EXPECT_EQ(connected_objects(two, 8), 2);

  Bitmap diag;
  diag.set(2, 3);
  diag.set(3, 4);
  EXPECT_EQ(connected_objects(diag, 8), 1);
  EXPECT_EQ(connected_objects(diag, 4), 2);
  EXPECT_THROW(connected_objects(diag, 6), ArgumentError);
}

TEST(CountHoles, Examples) {
  EXPECT_EQ(count_holes(filled(1, 1, 5, 9)), 0);
  EXPECT_EQ(count_holes(ring3x3()), 1);
  EXPECT_EQ(count_holes(Bitmap{}), 0);

  // A thin stroke pattern that isolates three single-pixel pockets.
  const Bitmap pockets = Bitmap::from_text(
      "........\n"
      ".###....\n"
      ".#.#....\n"
      ".####...\n"
      "..#.#...\n"
      "..####..\n"
      "....#.#.\n"
      "....###.\n");
  EXPECT_EQ(count_holes(pockets), 3);
  EXPECT_EQ(connected_objects(pockets), 1);
}

TEST(CountHoles, MatchesUnionFindAndEulerNumber) {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const Bitmap b = test_support::random_bitmap(rng, rng.uniform(0.1, 0.9));
    const int holes = count_holes(b);
    EXPECT_EQ(holes, test_support::union_find_holes(b)) << b.to_text();
    EXPECT_EQ(connected_objects(b, 8) - holes, bit_quad_euler(b)) << b.to_text();
  }
}

TEST(PerimeterLength, Examples) {
  Bitmap one;
  one.set(3, 3);
  EXPECT_EQ(perimeter_length(one), 4);
  EXPECT_EQ(perimeter_length(filled(2, 2, 2, 2)), 8);
  EXPECT_EQ(perimeter_length(ring3x3()), 16);
  // frame edge counts as background
  EXPECT_EQ(perimeter_length(filled(0, 0, 8, 16)), 2 * (8 + 16));
}

TEST(QuadrantCounts, Examples) {
  EXPECT_EQ(quadrant_counts(Bitmap{}), (std::array<int, 4>{0, 0, 0, 0}));
  EXPECT_EQ(quadrant_counts(filled(0, 0, 8, 16)), (std::array<int, 4>{32, 32, 32, 32}));
  Bitmap one;
  one.set(1, 1);
  EXPECT_EQ(quadrant_counts(one), (std::array<int, 4>{1, 0, 0, 0}));
  Bitmap br;
  br.set(7, 15);
  EXPECT_EQ(quadrant_counts(br), (std::array<int, 4>{0, 0, 0, 1}));
}

TEST(RegionStats, QuadrantsSumToActivePixels) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Bitmap b = test_support::random_bitmap(rng, rng.uniform());
    const RegionStats s = region_stats(b);
    EXPECT_EQ(s.quadrant_counts[0] + s.quadrant_counts[1] + s.quadrant_counts[2] +
                  s.quadrant_counts[3],
              s.active_pixels);
    EXPECT_EQ(s.active_pixels, b.count());
  }
}

TEST(Bitmap, TextRoundTrip) {
  Rng rng(8);
  const Bitmap b = test_support::random_bitmap(rng, 0.5);
  EXPECT_EQ(Bitmap::from_text(b.to_text()), b);
}
