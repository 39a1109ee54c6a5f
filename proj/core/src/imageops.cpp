#include "ocrhmm/imageops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ocrhmm/types.hpp"

namespace ocrhmm {
namespace {

constexpr int W = Bitmap::kCols;
constexpr int H = Bitmap::kRows;

struct RowTables {
  std::array<int, 256> count{};
  std::array<int, 256> sum_x{};
  std::array<int, 256> sum_xx{};

  constexpr RowTables() {
    for (int mask = 0; mask < 256; ++mask) {
      for (int c = 0; c < W; ++c) {
        if (mask & (1 << c)) {
          const int x = c + 1;
          count[mask] += 1;
          sum_x[mask] += x;
          sum_xx[mask] += x * x;
        }
      }
    }
  }
};

constexpr RowTables kRowTables{};

int row_mask(const Bitmap& bm, int row) {
  int mask = 0;
  for (int c = 0; c < W; ++c) {
    if (bm.at(c, row)) mask |= 1 << c;
  }
  return mask;
}

// Generic flood-fill labelling over a grid of `w` x `h` cells where
// `member(x, y)` selects the cells to label.
template <typename Member>
int count_components(int w, int h, bool eight, Member member) {
  std::vector<char> seen(static_cast<std::size_t>(w * h), 0);
  std::vector<int> stack;
  int components = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (seen[static_cast<std::size_t>(y * w + x)] || !member(x, y)) continue;
      ++components;
      seen[static_cast<std::size_t>(y * w + x)] = 1;
      stack.push_back(y * w + x);
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int cx = cur % w;
        const int cy = cur / w;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (!eight && dx != 0 && dy != 0) continue;
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const auto ni = static_cast<std::size_t>(ny * w + nx);
            if (seen[ni] || !member(nx, ny)) continue;
            seen[ni] = 1;
            stack.push_back(ny * w + nx);
          }
        }
      }
    }
  }
  return components;
}

}  // namespace

PixelMoments pixel_moments(const Bitmap& bitmap) {
  PixelMoments m;
  for (int r = 0; r < H; ++r) {
    const int mask = row_mask(bitmap, r);
    if (mask == 0) continue;
    const std::int64_t y = r + 1;
    const std::int64_t n = kRowTables.count[mask];
    const std::int64_t sx = kRowTables.sum_x[mask];
    m.count += n;
    m.sum_x += sx;
    m.sum_xx += kRowTables.sum_xx[mask];
    m.sum_y += n * y;
    m.sum_yy += n * y * y;
    m.sum_xy += sx * y;
  }
  return m;
}

EllipseStats ellipse_from_moments(const PixelMoments& m) {
  if (m.count == 0) throw EmptyRegionError("ellipse of an empty bitmap");
  const double n = static_cast<double>(m.count);
  const double n2 = n * n;
  EllipseStats s;
  s.centroid_x = static_cast<double>(m.sum_x) / n;
  s.centroid_y = static_cast<double>(m.sum_y) / n;
  s.mu20 = static_cast<double>(m.scaled_mu20()) / n2;
  s.mu02 = static_cast<double>(m.scaled_mu02()) / n2;
  s.mu11 = static_cast<double>(m.scaled_mu11()) / n2;

  // Flip y so counterclockwise is positive; keep +0 so a vertical major
  // axis lands on +90 rather than -90.
  double cross = -2.0 * s.mu11;
  if (cross == 0.0) cross = 0.0;
  s.orientation = 0.5 * std::atan2(cross, s.mu20 - s.mu02) * 180.0 / std::numbers::pi;

  const double half_trace = 0.5 * (s.mu20 + s.mu02);
  const double half_diff = 0.5 * (s.mu20 - s.mu02);
  const double radius = std::sqrt(half_diff * half_diff + s.mu11 * s.mu11);
  const double lambda_major = half_trace + radius;
  const double lambda_minor = std::max(0.0, half_trace - radius);
  s.major_axis = 4.0 * std::sqrt(lambda_major);
  s.minor_axis = 4.0 * std::sqrt(lambda_minor);
  if (s.major_axis > 0.0) {
    const double ratio = s.minor_axis / s.major_axis;
    s.eccentricity = std::sqrt(std::clamp(1.0 - ratio * ratio, 0.0, 1.0));
  }
  return s;
}

EllipseStats ellipse_stats(const Bitmap& bitmap) {
  return ellipse_from_moments(pixel_moments(bitmap));
}

Bitmap rotate_upright(const Bitmap& bitmap, double orientation_degrees) {
  if (bitmap.empty()) return bitmap;
  const PixelMoments m = pixel_moments(bitmap);
  const double cx = static_cast<double>(m.sum_x) / static_cast<double>(m.count);
  const double cy = static_cast<double>(m.sum_y) / static_cast<double>(m.count);
  const double phi = (90.0 - orientation_degrees) * std::numbers::pi / 180.0;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  // Rounding slack so values that are halves up to float noise resolve the
  // same way regardless of the sin/cos rounding.
  constexpr double kSlack = 1e-9;

  Bitmap out;
  for (int r = 0; r < H; ++r) {
    for (int col = 0; col < W; ++col) {
      // Output pixel in centred, y-up coordinates.
      const double u = (col + 1) - cx;
      const double v = -((r + 1) - cy);
      // Inverse rotation by -phi.
      const double su = u * c + v * s;
      const double sv = -u * s + v * c;
      const double src_x = cx + su;
      const double src_y = cy - sv;
      const int sc = static_cast<int>(std::floor(src_x + 0.5 + kSlack)) - 1;
      const int sr = static_cast<int>(std::floor(src_y + 0.5 + kSlack)) - 1;
      if (sc < 0 || sc >= W || sr < 0 || sr >= H) continue;
      if (bitmap.at(sc, sr)) out.set(col, r);
    }
  }
  return out;
}

int connected_objects(const Bitmap& bitmap, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw ArgumentError("connectivity must be 4 or 8");
  }
  return count_components(W, H, connectivity == 8,
                          [&](int x, int y) { return bitmap.at(x, y); });
}

int count_holes(const Bitmap& bitmap) {
  // Padded grid: (W+2) x (H+2), original pixel (x-1, y-1).
  auto background = [&](int x, int y) {
    if (x == 0 || y == 0 || x == W + 1 || y == H + 1) return true;
    return !bitmap.at(x - 1, y - 1);
  };
  return count_components(W + 2, H + 2, false, background) - 1;
}

int perimeter_length(const Bitmap& bitmap) {
  int edges = 0;
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      if (!bitmap.at(c, r)) continue;
      edges += (c == 0 || !bitmap.at(c - 1, r));
      edges += (c == W - 1 || !bitmap.at(c + 1, r));
      edges += (r == 0 || !bitmap.at(c, r - 1));
      edges += (r == H - 1 || !bitmap.at(c, r + 1));
    }
  }
  return edges;
}

std::array<int, 4> quadrant_counts(const Bitmap& bitmap) {
  std::array<int, 4> q{};
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      if (bitmap.at(c, r)) ++q[static_cast<std::size_t>((r / 8) * 2 + (c / 4))];
    }
  }
  return q;
}

RegionStats region_stats(const Bitmap& bitmap) {
  RegionStats s;
  s.object_count = connected_objects(bitmap, 8);
  s.hole_count = count_holes(bitmap);
  s.perimeter = perimeter_length(bitmap);
  s.quadrant_counts = quadrant_counts(bitmap);
  s.active_pixels = bitmap.count();
  return s;
}

}  // namespace ocrhmm
