#include "facet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace facet {

bool operator==(const BitMask& a, const BitMask& b) {
  return a.width == b.width && a.height == b.height && a.words == b.words;
}

BBox polygon_bbox(const Polygon& p) {
  BBox b{p.points[0].x, p.points[0].y, p.points[0].x, p.points[0].y};
  for (const auto& pt : p.points) {
    b.x1 = std::min(b.x1, pt.x);
    b.y1 = std::min(b.y1, pt.y);
    b.x2 = std::max(b.x2, pt.x);
    b.y2 = std::max(b.y2, pt.y);
  }
  return b;
}

double polygon_area(const Polygon& p) {
  double acc = 0.0;
  std::size_t n = p.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = p.points[i];
    const Point& b = p.points[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return std::abs(acc) * 0.5;
}

BitMask rasterize(const Polygon& p, int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("rasterize: non-positive canvas");
  BitMask mask(width, height);
  std::size_t n = p.points.size();
  if (n < 3) return mask;

  // Restrict scanning to rows the polygon can touch.
  double ymin = p.points[0].y, ymax = p.points[0].y;
  for (const auto& pt : p.points) {
    ymin = std::min(ymin, pt.y);
    ymax = std::max(ymax, pt.y);
  }
  double yl = std::max(0.0, std::floor(ymin - 1.0));
  double yh = std::min(static_cast<double>(height - 1), std::ceil(ymax) + 1.0);
  if (yl > yh) return mask;
  int j0 = static_cast<int>(yl);
  int j1 = static_cast<int>(yh);

  std::vector<double> crossings;
  for (int j = j0; j <= j1; ++j) {
    const double py = j + 0.5;
    crossings.clear();
    for (std::size_t e = 0; e < n; ++e) {
      const Point& a = p.points[e];
      const Point& b = p.points[(e + 1) % n];
      // Half-open crossing rule; the expression below must stay identical
      // to a per-pixel even-odd ray cast for bit-exact agreement.
      if ((a.y > py) != (b.y > py)) {
        double t = (py - a.y) / (b.y - a.y);
        crossings.push_back(a.x + t * (b.x - a.x));
      }
    }
    if (crossings.size() < 2) continue;
    std::sort(crossings.begin(), crossings.end());
    // A center at px is inside iff the number of crossings strictly greater
    // than px is odd, i.e. px in [c[2m], c[2m+1]).
    for (std::size_t m = 0; m + 1 < crossings.size(); m += 2) {
      // Clamp far-off-canvas crossings before the int conversion; inside
      // [-1, width+1] the exact values are preserved.
      double lo = std::clamp(crossings[m], -1.0, width + 1.0);
      double hi = std::clamp(crossings[m + 1], -1.0, width + 1.0);
      // first center >= lo, last center < hi; the adjust loops pin the
      // boundaries with the exact double comparisons.
      int i0 = static_cast<int>(std::floor(lo - 0.5));
      while (i0 + 0.5 < lo) ++i0;
      while (i0 > 0 && (i0 - 1) + 0.5 >= lo) --i0;
      int i1 = static_cast<int>(std::floor(hi - 0.5));
      while (i1 + 0.5 >= hi) --i1;
      while ((i1 + 1) + 0.5 < hi) ++i1;
      i0 = std::max(i0, 0);
      i1 = std::min(i1, width - 1);
      for (int i = i0; i <= i1; ++i) mask.set(i, j);
    }
  }
  return mask;
}

double bbox_iou(const BBox& a, const BBox& b) {
  double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  double inter = std::max(iw, 0.0) * std::max(ih, 0.0);
  double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double mask_iou(const BitMask& a, const BitMask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("mask_iou: dimension mismatch");
  }
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i) {
    inter += static_cast<std::size_t>(std::popcount(a.words[i] & b.words[i]));
    uni += static_cast<std::size_t>(std::popcount(a.words[i] | b.words[i]));
  }
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

BoxDelta encode_delta(const BBox& anchor, const BBox& gt) {
  if (anchor.width() <= 0.0 || anchor.height() <= 0.0) {
    throw std::invalid_argument("encode_delta: anchor has non-positive size");
  }
  if (gt.width() <= 0.0 || gt.height() <= 0.0) {
    throw std::invalid_argument("encode_delta: gt box has non-positive size");
  }
  BoxDelta d;
  d.dx = (gt.cx() - anchor.cx()) / anchor.width();
  d.dy = (gt.cy() - anchor.cy()) / anchor.height();
  d.dw = std::log(gt.width() / anchor.width());
  d.dh = std::log(gt.height() / anchor.height());
  return d;
}

BBox decode_delta(const BBox& anchor, const BoxDelta& d) {
  if (anchor.width() <= 0.0 || anchor.height() <= 0.0) {
    throw std::invalid_argument("decode_delta: anchor has non-positive size");
  }
  double cx = anchor.cx() + d.dx * anchor.width();
  double cy = anchor.cy() + d.dy * anchor.height();
  double w = anchor.width() * std::exp(d.dw);
  double h = anchor.height() * std::exp(d.dh);
  return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
}

SoftMask mask_down(const BitMask& m, int side) {
  if (m.width <= 0 || m.height <= 0) throw std::invalid_argument("mask_down: empty mask");
  if (side <= 0) throw std::invalid_argument("mask_down: non-positive side");
  SoftMask s(side);
  const double sx = static_cast<double>(m.width) / side;
  const double sy = static_cast<double>(m.height) / side;
  for (int ty = 0; ty < side; ++ty) {
    double y0 = ty * sy, y1 = (ty + 1) * sy;
    int iy0 = static_cast<int>(std::floor(y0));
    int iy1 = std::min(m.height - 1, static_cast<int>(std::ceil(y1)) - 1);
    for (int tx = 0; tx < side; ++tx) {
      double x0 = tx * sx, x1 = (tx + 1) * sx;
      int ix0 = static_cast<int>(std::floor(x0));
      int ix1 = std::min(m.width - 1, static_cast<int>(std::ceil(x1)) - 1);
      double covered = 0.0;
      for (int sy_i = iy0; sy_i <= iy1; ++sy_i) {
        double hy = std::min(y1, sy_i + 1.0) - std::max(y0, static_cast<double>(sy_i));
        if (hy <= 0.0) continue;
        for (int sx_i = ix0; sx_i <= ix1; ++sx_i) {
          if (!m.get(sx_i, sy_i)) continue;
          double wx = std::min(x1, sx_i + 1.0) - std::max(x0, static_cast<double>(sx_i));
          if (wx > 0.0) covered += wx * hy;
        }
      }
      double cell = (x1 - x0) * (y1 - y0);
      s.values[static_cast<std::size_t>(ty) * side + tx] =
          std::clamp(cell > 0.0 ? covered / cell : 0.0, 0.0, 1.0);
    }
  }
  return s;
}

BitMask mask_up(const SoftMask& s, const BBox& box, double threshold) {
  if (box.width() <= 0.0 || box.height() <= 0.0) {
    throw std::invalid_argument("mask_up: zero-area box");
  }
  int out_w = std::max(1, static_cast<int>(std::lround(box.width())));
  int out_h = std::max(1, static_cast<int>(std::lround(box.height())));
  BitMask m(out_w, out_h);
  const int side = s.side;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * side / out_h - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(side - 1));
    int y0 = static_cast<int>(std::floor(fy));
    int y1 = std::min(side - 1, y0 + 1);
    double wy = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * side / out_w - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(side - 1));
      int x0 = static_cast<int>(std::floor(fx));
      int x1 = std::min(side - 1, x0 + 1);
      double wx = fx - x0;
      double v = s.at(x0, y0) * (1 - wx) * (1 - wy) + s.at(x1, y0) * wx * (1 - wy) +
                 s.at(x0, y1) * (1 - wx) * wy + s.at(x1, y1) * wx * wy;
      if (v >= threshold) m.set(x, y);
    }
  }
  return m;
}

Grid2D roi_max_pool(const Grid2D& g, const BBox& roi, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("roi_max_pool: non-positive output");
  double ix1 = std::max(roi.x1, 0.0), iy1 = std::max(roi.y1, 0.0);
  double ix2 = std::min(roi.x2, static_cast<double>(g.width));
  double iy2 = std::min(roi.y2, static_cast<double>(g.height));
  if (ix1 >= ix2 || iy1 >= iy2) throw std::invalid_argument("roi_max_pool: roi outside grid");

  auto edge = [](double lo, double hi, int bins, int i) {
    return static_cast<int>(std::lround(lo + (hi - lo) * i / bins));
  };

  Grid2D out(out_w, out_h, g.channels);
  for (int by = 0; by < out_h; ++by) {
    int y0 = std::clamp(edge(roi.y1, roi.y2, out_h, by), 0, g.height);
    int y1 = std::clamp(edge(roi.y1, roi.y2, out_h, by + 1), 0, g.height);
    for (int bx = 0; bx < out_w; ++bx) {
      int x0 = std::clamp(edge(roi.x1, roi.x2, out_w, bx), 0, g.width);
      int x1 = std::clamp(edge(roi.x1, roi.x2, out_w, bx + 1), 0, g.width);
      for (int c = 0; c < g.channels; ++c) {
        double best = 0.0;  // empty bins stay 0
        bool any = false;
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) {
            double v = g.at(x, y, c);
            if (!any || v > best) {
              best = v;
              any = true;
            }
          }
        }
        out.at(bx, by, c) = any ? best : 0.0;
      }
    }
  }
  return out;
}

BBox clip_box(const BBox& b, double image_w, double image_h) {
  BBox c;
  c.x1 = std::clamp(b.x1, 0.0, image_w);
  c.y1 = std::clamp(b.y1, 0.0, image_h);
  c.x2 = std::clamp(b.x2, 0.0, image_w);
  c.y2 = std::clamp(b.y2, 0.0, image_h);
  return c;
}

std::string to_pgm(const BitMask& m) {
  if (m.width <= 0 || m.height <= 0) throw std::invalid_argument("to_pgm: empty mask");
  char header[64];
  std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", m.width, m.height);
  std::string out(header);
  out.reserve(out.size() + static_cast<std::size_t>(m.width) * m.height);
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      out.push_back(m.get(x, y) ? static_cast<char>(255) : static_cast<char>(0));
    }
  }
  return out;
}

BitMask parse_pgm(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw ParseError("parse_pgm: not a P5 file");
  int w = 0, h = 0, maxval = 0;
  in >> w >> h >> maxval;
  if (!in || w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw ParseError("parse_pgm: bad header");
  }
  in.get();  // single whitespace after maxval
  BitMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int c = in.get();
      if (c == EOF) throw ParseError("parse_pgm: truncated pixel data");
      if (c >= 128) m.set(x, y);
    }
  }
  return m;
}

std::string soft_mask_csv(const SoftMask& s) {
  std::string out;
  char buf[40];
  for (int y = 0; y < s.side; ++y) {
    for (int x = 0; x < s.side; ++x) {
      std::snprintf(buf, sizeof(buf), "%.9g", s.at(x, y));
      if (x) out.push_back(',');
      out += buf;
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace facet
