#include "facet/augment.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "facet/geometry.hpp"
#include "facet/rng.hpp"
#include "json.hpp"

namespace facet {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }

std::string op_suffix(const AugmentItem& item) {
  char buf[96];
  std::string s;
  std::snprintf(buf, sizeof(buf), "_c%d", item.copy);
  s += buf;
  for (const auto& op : item.ops) {
    if (op.kind == AugmentOp::Kind::Fliplr) {
      s += "_flip";
    } else {
      std::snprintf(buf, sizeof(buf), "_r%+08.3f_s%+08.3f", op.affine->rotation_deg,
                    op.affine->shear_deg);
      s += buf;
    }
  }
  return s;
}

std::string suffixed_filename(const std::string& filename, const std::string& suffix) {
  auto dot = filename.find_last_of('.');
  if (dot == std::string::npos || dot == 0) return filename + suffix;
  return filename.substr(0, dot) + suffix + filename.substr(dot);
}

}  // namespace

AffineParams::AffineParams(double rotation, double shear, double center_x, double center_y)
    : rotation_deg(rotation), shear_deg(shear), cx(center_x), cy(center_y) {
  if (!(rotation >= -kMaxRotationDeg && rotation <= kMaxRotationDeg)) {
    throw std::out_of_range("rotation outside [-45, 45] degrees");
  }
  if (!(shear >= -kMaxShearDeg && shear <= kMaxShearDeg)) {
    throw std::out_of_range("shear outside [-16, 16] degrees");
  }
}

Mat3 mat3_identity() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out[r * 3 + c] = a[r * 3] * b[c] + a[r * 3 + 1] * b[3 + c] + a[r * 3 + 2] * b[6 + c];
    }
  }
  return out;
}

Point mat3_apply(const Mat3& m, const Point& p) {
  return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]};
}

Polygon fliplr_polygon(const Polygon& p, double image_width) {
  if (image_width <= 0.0) throw std::invalid_argument("fliplr_polygon: non-positive width");
  Polygon out;
  out.points.reserve(p.points.size());
  for (const auto& pt : p.points) out.points.push_back({image_width - pt.x, pt.y});
  return out;
}

Mat3 fliplr_matrix(double image_width) { return {-1, 0, image_width, 0, 1, 0, 0, 0, 1}; }

Mat3 affine_matrix(const AffineParams& a) {
  const double th = deg2rad(a.rotation_deg);
  const double ph = deg2rad(a.shear_deg);
  const double c = std::cos(th), s = std::sin(th), t = std::tan(ph);
  // R * Sh, unit-determinant shear along x.
  Mat3 rs = {c, c * t - s, 0, s, s * t + c, 0, 0, 0, 1};
  Mat3 to_origin = {1, 0, -a.cx, 0, 1, -a.cy, 0, 0, 1};
  Mat3 back = {1, 0, a.cx, 0, 1, a.cy, 0, 0, 1};
  return mat3_mul(back, mat3_mul(rs, to_origin));
}

Polygon affine_polygon(const Polygon& p, const AffineParams& a) {
  const Mat3 m = affine_matrix(a);
  Polygon out;
  out.points.reserve(p.points.size());
  for (const auto& pt : p.points) out.points.push_back(mat3_apply(m, pt));
  return out;
}

AugmentPlan plan_augmentation(const Dataset& d, std::uint64_t seed, int per_image_copies,
                              const AugmentRanges& ranges) {
  if (per_image_copies < 1) throw std::invalid_argument("per_image_copies must be >= 1");
  if (ranges.rotation_min > ranges.rotation_max || ranges.shear_min > ranges.shear_max) {
    throw std::invalid_argument("augmentation range is inverted");
  }
  AugmentPlan plan;
  plan.seed = seed;
  plan.copies = per_image_copies;
  plan.source_images = d.images.size();

  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < d.images.size(); ++i) {
    const auto& img = d.images[i];
    double cx = img.width > 0 ? img.width / 2.0 : 0.0;
    double cy = img.height > 0 ? img.height / 2.0 : 0.0;
    for (int c = 0; c < per_image_copies; ++c) {
      AugmentItem item;
      item.image_index = i;
      item.copy = c;
      bool flip = rng.next_unit() < 0.5;
      double rot = rng.next_range(ranges.rotation_min, ranges.rotation_max);
      double shear = rng.next_range(ranges.shear_min, ranges.shear_max);
      if (flip) item.ops.push_back({AugmentOp::Kind::Fliplr, std::nullopt});
      item.ops.push_back({AugmentOp::Kind::Affine, AffineParams(rot, shear, cx, cy)});
      item.suffix = op_suffix(item);
      plan.items.push_back(std::move(item));
    }
  }
  return plan;
}

AugmentOutput apply_plan(const Dataset& d, const AugmentPlan& plan) {
  if (plan.source_images != d.images.size()) {
    throw std::invalid_argument("plan was built for a different dataset");
  }
  AugmentOutput out;
  out.dataset.class_names = d.class_names;
  out.dataset.images.reserve(plan.items.size());

  for (const auto& item : plan.items) {
    const ImageRecord& src = d.images.at(item.image_index);
    ImageRecord rec;
    rec.filename = suffixed_filename(src.filename, item.suffix);
    rec.file_size = src.file_size;
    rec.width = src.width;
    rec.height = src.height;

    for (const auto& region : src.regions) {
      Region moved = region;
      for (const auto& op : item.ops) {
        if (op.kind == AugmentOp::Kind::Fliplr) {
          if (src.width <= 0) {
            throw std::invalid_argument("apply_plan: fliplr needs resolved width for " +
                                        src.filename);
          }
          moved.polygon = fliplr_polygon(moved.polygon, static_cast<double>(src.width));
        } else {
          moved.polygon = affine_polygon(moved.polygon, *op.affine);
        }
      }
      if (rec.width > 0 && rec.height > 0) {
        for (auto& pt : moved.polygon.points) {
          double cx = std::min(std::max(pt.x, 0.0), static_cast<double>(rec.width));
          double cy = std::min(std::max(pt.y, 0.0), static_cast<double>(rec.height));
          if (cx != pt.x || cy != pt.y) {
            ++out.clamped_vertices;
            pt.x = cx;
            pt.y = cy;
          }
        }
        if (polygon_area(moved.polygon) < 1.0) {
          ++out.dropped_regions;
          continue;
        }
      }
      rec.regions.push_back(std::move(moved));
    }
    out.dataset.images.push_back(std::move(rec));
  }
  return out;
}

std::string transform_sidecar_json(const Dataset& d, const AugmentPlan& plan) {
  if (plan.source_images != d.images.size()) {
    throw std::invalid_argument("plan was built for a different dataset");
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& item : plan.items) {
    const ImageRecord& src = d.images.at(item.image_index);
    Mat3 m = mat3_identity();
    std::string op_desc;
    for (const auto& op : item.ops) {
      if (op.kind == AugmentOp::Kind::Fliplr) {
        if (src.width <= 0) {
          throw std::invalid_argument("transform_sidecar_json: fliplr needs resolved width for " +
                                      src.filename);
        }
        m = mat3_mul(fliplr_matrix(static_cast<double>(src.width)), m);
        op_desc += op_desc.empty() ? "fliplr" : "+fliplr";
      } else {
        m = mat3_mul(affine_matrix(*op.affine), m);
        op_desc += op_desc.empty() ? "affine" : "+affine";
      }
    }
    nlohmann::ordered_json entry;
    entry["filename"] = suffixed_filename(src.filename, item.suffix);
    entry["source"] = src.filename;
    entry["op"] = op_desc;
    entry["matrix"] = m;
    arr.push_back(std::move(entry));
  }
  return arr.dump(2);
}

}  // namespace facet
