#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "facet/annotations.hpp"

namespace facet {

// Rotation + unit x-shear about a center point. Angles are hard-capped at
// construction; rotation is counter-clockwise in math coordinates, which is
// clockwise on a y-down canvas.
struct AffineParams {
  static constexpr double kMaxRotationDeg = 45.0;
  static constexpr double kMaxShearDeg = 16.0;

  double rotation_deg = 0.0;
  double shear_deg = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  AffineParams(double rotation, double shear, double center_x, double center_y);
};

// Row-major 3x3 homogeneous transform.
using Mat3 = std::array<double, 9>;

Mat3 mat3_identity();
Mat3 mat3_mul(const Mat3& a, const Mat3& b);
Point mat3_apply(const Mat3& m, const Point& p);

struct AugmentOp {
  enum class Kind { Fliplr, Affine };
  Kind kind = Kind::Fliplr;
  std::optional<AffineParams> affine;  // set when kind == Affine
};

// One augmented copy of one source image.
struct AugmentItem {
  std::size_t image_index = 0;
  int copy = 0;
  std::vector<AugmentOp> ops;
  std::string suffix;  // appended to the source stem
};

struct AugmentPlan {
  std::uint64_t seed = 0;
  int copies = 1;
  std::size_t source_images = 0;
  std::vector<AugmentItem> items;
};

struct AugmentRanges {
  double rotation_min = -AffineParams::kMaxRotationDeg;
  double rotation_max = AffineParams::kMaxRotationDeg;
  double shear_min = -AffineParams::kMaxShearDeg;
  double shear_max = AffineParams::kMaxShearDeg;
};

struct AugmentOutput {
  Dataset dataset;
  std::size_t clamped_vertices = 0;
  std::size_t dropped_regions = 0;  // degenerate (< 1 px^2) after clamping
};

// x -> width - x, y unchanged. Continuous convention, pairs with corner
// boxes (no width-1).
Polygon fliplr_polygon(const Polygon& p, double image_width);

Polygon affine_polygon(const Polygon& p, const AffineParams& a);

Mat3 fliplr_matrix(double image_width);
Mat3 affine_matrix(const AffineParams& a);

// Fix all randomness up front: per image and copy, a fliplr with
// probability 0.5 followed by an affine with uniform parameters. The
// transform center is the image center when dimensions are resolved.
AugmentPlan plan_augmentation(const Dataset& d, std::uint64_t seed, int per_image_copies,
                              const AugmentRanges& ranges = {});

// Apply a plan built for d. Transformed vertices are clamped to the canvas
// (when dimensions are resolved) and polygons that degenerate are dropped;
// both events are counted in the output.
AugmentOutput apply_plan(const Dataset& d, const AugmentPlan& plan);

// JSON sidecar: one {filename, op, matrix} entry per augmented image so a
// raster pipeline can replay the same transforms on pixels.
std::string transform_sidecar_json(const Dataset& d, const AugmentPlan& plan);

}  // namespace facet
