#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "facet/eval.hpp"

namespace facet {

struct RGB {
  unsigned char r = 0;
  unsigned char g = 0;
  unsigned char b = 0;
};

// Row-major 8-bit RGB raster.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> rgb;

  Image() = default;
  Image(int w, int h, RGB fill = {0, 0, 0});
  RGB get(int x, int y) const {
    std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  void set(int x, int y, RGB c) {
    std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = c.r;
    rgb[i + 1] = c.g;
    rgb[i + 2] = c.b;
  }
};

inline bool operator==(const Image& a, const Image& b) {
  return a.width == b.width && a.height == b.height && a.rgb == b.rgb;
}

enum class OverlayMode { GtOnly, PredOnly, Overlap };
enum class CaptionMode { None, Class, Score, ScoreIou };

struct OverlaySpec {
  OverlayMode mode = OverlayMode::Overlap;
  CaptionMode caption = CaptionMode::ScoreIou;
  double fill_alpha = 0.35;  // [0, 1]
  int outline_width = 2;     // inward, keeps paint inside the instance
};

// Ground truth in green, predictions in red (Overlap) or per-instance
// hash-derived colors (PredOnly). Fills are alpha-blended; captions use the
// built-in 5x7 font at each instance's bbox top-left. Inputs are read-only;
// a new image is returned.
Image render_overlay(const Image& base, const std::vector<Region>& gts,
                     const std::vector<Detection>& preds, const std::vector<double>& pred_ious,
                     const OverlaySpec& spec);

// Opaque 5x7 bitmap text (digits, A-Z, '.', '/', '-', ':'); lowercase maps
// to uppercase, unknown glyphs render as blanks.
void draw_text(Image& img, int x, int y, const std::string& text, RGB color);

// Deterministic per-instance color.
RGB instance_color(const std::string& image_name, std::size_t instance_index);

enum class ImageFormat { PPM, PNG };

std::string encode_ppm(const Image& img);  // P6, bit-exact
Image decode_ppm(const std::string& bytes);
std::string encode_png(const Image& img);  // stored (uncompressed) deflate

void write_image(const Image& img, const std::filesystem::path& path, ImageFormat format);

}  // namespace facet
