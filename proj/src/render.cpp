#include "facet/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "facet/rng.hpp"

namespace facet {

namespace {

// 5x7 glyphs, one byte per row, bit 4 = leftmost column.
struct Glyph {
  char ch;
  unsigned char rows[7];
};

constexpr Glyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'/', {0x01, 0x02, 0x04, 0x04, 0x08, 0x10, 0x00}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};

const Glyph* find_glyph(char c) {
  if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  for (const auto& g : kFont) {
    if (g.ch == c) return &g;
  }
  return nullptr;
}

RGB blend(RGB base, RGB color, double alpha) {
  auto mix = [&](unsigned char b, unsigned char c) {
    return static_cast<unsigned char>(
        std::lround((1.0 - alpha) * static_cast<double>(b) + alpha * static_cast<double>(c)));
  };
  return {mix(base.r, color.r), mix(base.g, color.g), mix(base.b, color.b)};
}

// Boundary of a mask thickened inward by `width` pixels.
BitMask inner_outline(const BitMask& mask, int width) {
  BitMask ring(mask.width, mask.height);
  if (width <= 0) return ring;
  BitMask core = mask;
  for (int step = 0; step < width; ++step) {
    BitMask next(core.width, core.height);
    bool any = false;
    for (int y = 0; y < core.height; ++y) {
      for (int x = 0; x < core.width; ++x) {
        if (!core.get(x, y)) continue;
        bool edge = x == 0 || y == 0 || x == core.width - 1 || y == core.height - 1 ||
                    !core.get(x - 1, y) || !core.get(x + 1, y) || !core.get(x, y - 1) ||
                    !core.get(x, y + 1);
        if (edge) {
          ring.set(x, y);
        } else {
          next.set(x, y);
          any = true;
        }
      }
    }
    core = std::move(next);
    if (!any) break;
  }
  return ring;
}

void paint_instance(Image& img, const BitMask& mask, RGB color, const OverlaySpec& spec) {
  BitMask ring = inner_outline(mask, spec.outline_width);
  for (int y = 0; y < mask.height && y < img.height; ++y) {
    for (int x = 0; x < mask.width && x < img.width; ++x) {
      if (!mask.get(x, y)) continue;
      if (ring.get(x, y)) {
        img.set(x, y, color);  // solid outline
      } else if (spec.fill_alpha > 0.0) {
        img.set(x, y, blend(img.get(x, y), color, spec.fill_alpha));
      }
    }
  }
}

std::string format_caption(CaptionMode mode, const std::string& class_name, double score,
                           double iou) {
  char buf[64];
  switch (mode) {
    case CaptionMode::Class:
      return class_name;
    case CaptionMode::Score:
      std::snprintf(buf, sizeof(buf), "%.2f", score);
      return buf;
    case CaptionMode::ScoreIou:
      std::snprintf(buf, sizeof(buf), "%.2f/%.2f", score, iou);
      return buf;
    default:
      return "";
  }
}

void put_be32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>((v >> 24) & 0xFF));
  s.push_back(static_cast<char>((v >> 16) & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
  s.push_back(static_cast<char>(v & 0xFF));
}

std::uint32_t crc32(const unsigned char* data, std::size_t n) {
  static std::uint32_t table[256];
  static bool init = false;
  if (!init) {
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      table[i] = c;
    }
    init = true;
  }
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < n; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

std::uint32_t adler32(const unsigned char* data, std::size_t n) {
  std::uint32_t a = 1, b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a = (a + data[i]) % 65521u;
    b = (b + a) % 65521u;
  }
  return (b << 16) | a;
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
  put_be32(out, static_cast<std::uint32_t>(payload.size()));
  std::string body(type, 4);
  body += payload;
  out += body;
  put_be32(out, crc32(reinterpret_cast<const unsigned char*>(body.data()), body.size()));
}

}  // namespace

Image::Image(int w, int h, RGB fill)
    : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i + 2 < rgb.size(); i += 3) {
    rgb[i] = fill.r;
    rgb[i + 1] = fill.g;
    rgb[i + 2] = fill.b;
  }
}

void draw_text(Image& img, int x, int y, const std::string& text, RGB color) {
  int cx = x;
  for (char c : text) {
    const Glyph* g = find_glyph(c);
    if (g) {
      for (int row = 0; row < 7; ++row) {
        for (int col = 0; col < 5; ++col) {
          if (!(g->rows[row] & (0x10 >> col))) continue;
          int px = cx + col, py = y + row;
          if (px >= 0 && py >= 0 && px < img.width && py < img.height) img.set(px, py, color);
        }
      }
    }
    cx += 6;  // 5px glyph + 1px spacing
  }
}

RGB instance_color(const std::string& image_name, std::size_t instance_index) {
  std::uint64_t h = fnv1a64(image_name + ":" + std::to_string(instance_index));
  // keep channels off the dark end so overlays stay visible
  return {static_cast<unsigned char>(64 + (h & 0xFF) % 192),
          static_cast<unsigned char>(64 + ((h >> 8) & 0xFF) % 192),
          static_cast<unsigned char>(64 + ((h >> 16) & 0xFF) % 192)};
}

Image render_overlay(const Image& base, const std::vector<Region>& gts,
                     const std::vector<Detection>& preds, const std::vector<double>& pred_ious,
                     const OverlaySpec& spec) {
  if (base.width <= 0 || base.height <= 0) {
    throw std::invalid_argument("render_overlay: empty base image");
  }
  if (!(spec.fill_alpha >= 0.0 && spec.fill_alpha <= 1.0)) {
    throw std::invalid_argument("render_overlay: fill_alpha outside [0, 1]");
  }
  Image out = base;
  const RGB green{0, 255, 0};
  const RGB red{255, 0, 0};
  const RGB white{255, 255, 255};

  if (spec.mode == OverlayMode::GtOnly || spec.mode == OverlayMode::Overlap) {
    for (const auto& region : gts) {
      BitMask m = rasterize(region.polygon, base.width, base.height);
      paint_instance(out, m, green, spec);
    }
    if (spec.mode == OverlayMode::GtOnly && spec.caption == CaptionMode::Class) {
      for (const auto& region : gts) {
        BBox b = polygon_bbox(region.polygon);
        draw_text(out, static_cast<int>(std::lround(b.x1)), static_cast<int>(std::lround(b.y1)),
                  region.class_name(), white);
      }
    }
  }

  if (spec.mode == OverlayMode::PredOnly || spec.mode == OverlayMode::Overlap) {
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const Detection& det = preds[i];
      BitMask m;
      if (const auto* poly = std::get_if<Polygon>(&det.payload)) {
        m = rasterize(*poly, base.width, base.height);
      } else if (const auto* box = std::get_if<BBox>(&det.payload)) {
        Polygon quad{{{box->x1, box->y1}, {box->x2, box->y1}, {box->x2, box->y2}, {box->x1, box->y2}}};
        m = rasterize(quad, base.width, base.height);
      } else {
        const auto& mask = std::get<BitMask>(det.payload);
        if (mask.width != base.width || mask.height != base.height) {
          throw std::invalid_argument("render_overlay: mask payload dimension mismatch");
        }
        m = mask;
      }
      RGB color = spec.mode == OverlayMode::Overlap ? red : instance_color(det.image, i);
      paint_instance(out, m, color, spec);

      if (spec.caption != CaptionMode::None) {
        double iou = i < pred_ious.size() ? pred_ious[i] : 0.0;
        std::string text = format_caption(spec.caption, det.class_name, det.score, iou);
        BBox b{0, 0, 0, 0};
        if (const auto* poly = std::get_if<Polygon>(&det.payload)) {
          b = polygon_bbox(*poly);
        } else if (const auto* box = std::get_if<BBox>(&det.payload)) {
          b = *box;
        } else {
          b = BBox{0, 0, static_cast<double>(base.width), static_cast<double>(base.height)};
        }
        draw_text(out, static_cast<int>(std::lround(b.x1)), static_cast<int>(std::lround(b.y1)),
                  text, white);
      }
    }
  }
  return out;
}

std::string encode_ppm(const Image& img) {
  if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("encode_ppm: empty image");
  char header[64];
  std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", img.width, img.height);
  std::string out(header);
  out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
  return out;
}

Image decode_ppm(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw ParseError("decode_ppm: not a P6 file");
  int w = 0, h = 0, maxval = 0;
  in >> w >> h >> maxval;
  if (!in || w <= 0 || h <= 0 || maxval != 255) throw ParseError("decode_ppm: bad header");
  in.get();
  Image img(w, h);
  in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.rgb.size())) {
    throw ParseError("decode_ppm: truncated pixel data");
  }
  return img;
}

std::string encode_png(const Image& img) {
  if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("encode_png: empty image");

  // filter byte 0 per row
  std::string raw;
  raw.reserve(static_cast<std::size_t>(img.height) * (1 + 3 * img.width));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back('\0');
    raw.append(reinterpret_cast<const char*>(img.rgb.data()) +
                   static_cast<std::size_t>(y) * img.width * 3,
               static_cast<std::size_t>(img.width) * 3);
  }

  // zlib stream with stored deflate blocks
  std::string z;
  z.push_back(0x78);
  z.push_back(0x01);
  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t chunk = std::min<std::size_t>(65535, raw.size() - pos);
    bool last = pos + chunk == raw.size();
    z.push_back(last ? 1 : 0);
    z.push_back(static_cast<char>(chunk & 0xFF));
    z.push_back(static_cast<char>((chunk >> 8) & 0xFF));
    z.push_back(static_cast<char>(~chunk & 0xFF));
    z.push_back(static_cast<char>((~chunk >> 8) & 0xFF));
    z.append(raw, pos, chunk);
    pos += chunk;
  }
  put_be32(z, adler32(reinterpret_cast<const unsigned char*>(raw.data()), raw.size()));

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(img.width));
  put_be32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // truecolor
  ihdr.push_back(0);   // deflate
  ihdr.push_back(0);   // adaptive filters
  ihdr.push_back(0);   // no interlace
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", z);
  append_chunk(out, "IEND", "");
  return out;
}

void write_image(const Image& img, const std::filesystem::path& path, ImageFormat format) {
  std::string bytes = format == ImageFormat::PPM ? encode_ppm(img) : encode_png(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace facet
