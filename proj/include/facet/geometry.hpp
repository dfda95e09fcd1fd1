#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "facet/annotations.hpp"

namespace facet {

// Axis-aligned box, continuous corner coordinates, half-open on integer
// grids. area = (x2-x1)*(y2-y1), no +1 anywhere.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double cx() const { return 0.5 * (x1 + x2); }
  double cy() const { return 0.5 * (y1 + y2); }
};

inline bool operator==(const BBox& a, const BBox& b) {
  return a.x1 == b.x1 && a.y1 == b.y1 && a.x2 == b.x2 && a.y2 == b.y2;
}

// Binary raster, row-major, bit-packed 64 bits per word. Bits past
// width*height in the last word stay zero so popcounts are word-wise.
struct BitMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint64_t> words;

  BitMask() = default;
  BitMask(int w, int h)
      : width(w), height(h), words((static_cast<std::size_t>(w) * h + 63) / 64, 0) {}

  bool get(int x, int y) const {
    std::size_t i = static_cast<std::size_t>(y) * width + x;
    return (words[i >> 6] >> (i & 63)) & 1u;
  }
  void set(int x, int y) {
    std::size_t i = static_cast<std::size_t>(y) * width + x;
    words[i >> 6] |= std::uint64_t(1) << (i & 63);
  }
  void clear(int x, int y) {
    std::size_t i = static_cast<std::size_t>(y) * width + x;
    words[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const { return width == 0 || height == 0; }
};

bool operator==(const BitMask& a, const BitMask& b);

// Low-resolution float mask, values in [0,1], row-major side x side.
struct SoftMask {
  int side = 28;
  std::vector<double> values;

  explicit SoftMask(int s = 28) : side(s), values(static_cast<std::size_t>(s) * s, 0.0) {}
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * side + x]; }
};

// Box refinement parameters: center offsets relative to anchor size, log
// size ratios.
struct BoxDelta {
  double dx = 0.0;
  double dy = 0.0;
  double dw = 0.0;
  double dh = 0.0;
};

// Dense float grid used as the RoI-pooling input carrier; values are
// interleaved (y, x, channel).
struct Grid2D {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> values;

  Grid2D() = default;
  Grid2D(int w, int h, int c)
      : width(w), height(h), channels(c),
        values(static_cast<std::size_t>(w) * h * c, 0.0) {}
  double at(int x, int y, int c) const {
    return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double& at(int x, int y, int c) {
    return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

BBox polygon_bbox(const Polygon& p);

// Shoelace area, orientation-independent.
double polygon_area(const Polygon& p);

// Scanline fill: pixel (i,j) is set iff its center (i+0.5, j+0.5) lies
// inside the polygon under the even-odd rule. Matches a per-pixel even-odd
// ray cast exactly, including boundary cases.
BitMask rasterize(const Polygon& p, int width, int height);

double bbox_iou(const BBox& a, const BBox& b);

// popcount(a&b)/popcount(a|b); 0 when both masks are empty. Throws on
// dimension mismatch.
double mask_iou(const BitMask& a, const BitMask& b);

BoxDelta encode_delta(const BBox& anchor, const BBox& gt);
BBox decode_delta(const BBox& anchor, const BoxDelta& d);

// Exact area-average downscale into side x side floats.
SoftMask mask_down(const BitMask& m, int side = 28);

// Bilinear upscale to the box's integer pixel extent, then threshold.
BitMask mask_up(const SoftMask& s, const BBox& box, double threshold = 0.5);

// Max-pool the roi into out_h x out_w bins per channel; integer bin edges
// by rounding, empty bins yield 0.
Grid2D roi_max_pool(const Grid2D& g, const BBox& roi, int out_h = 7, int out_w = 7);

BBox clip_box(const BBox& b, double image_w, double image_h);

// Debug serialization.
std::string to_pgm(const BitMask& m);           // P5, 0/255
BitMask parse_pgm(const std::string& bytes);
std::string soft_mask_csv(const SoftMask& s);

}  // namespace facet
