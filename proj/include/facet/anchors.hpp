#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "facet/geometry.hpp"

namespace facet {

// Anchor grid parameters: one anchor per (cell, scale, ratio). Ratio is
// width/height; an anchor of scale s and ratio r has w = s*sqrt(r),
// h = s/sqrt(r), so its area is always s^2.
struct AnchorConfig {
  std::vector<double> scales{128.0, 256.0, 512.0};
  std::vector<double> ratios{0.5, 1.0, 2.0};
  int stride = 32;  // feature-map cell size in image pixels

  int k() const { return static_cast<int>(scales.size() * ratios.size()); }
};

enum class AnchorClass { Foreground, Background, Ignore };

struct AnchorLabel {
  AnchorClass cls = AnchorClass::Ignore;
  int gt_index = -1;  // matched ground truth when foreground
};

struct Proposal {
  BBox box;
  double score = 0.0;
};

// Exactly fmap_w*fmap_h*k boxes, centered at cell centers, unclipped.
// Ordering: rows, then columns, then scale-major anchor index.
std::vector<BBox> generate_anchors(const AnchorConfig& cfg, int fmap_w, int fmap_h,
                                   int image_w, int image_h);

// Foreground if IoU >= pos_iou with any gt or the anchor is a gt's argmax
// (only when that IoU > 0); background if max IoU < neg_iou; else ignore.
std::vector<AnchorLabel> assign_anchors(const std::vector<BBox>& anchors,
                                        const std::vector<BBox>& gt_boxes,
                                        double pos_iou = 0.7, double neg_iou = 0.3);

// Greedy score-descending suppression; a proposal is dropped iff its IoU
// with an already kept one is strictly greater than the threshold. Ties in
// score keep the lower original index first. Returns kept indices in keep
// order.
std::vector<std::size_t> nms(const std::vector<Proposal>& proposals, double iou_threshold = 0.5);

// Decode deltas, clip to the image, keep the top pre_nms_top_n by score,
// suppress, truncate to post_nms_top_n.
std::vector<Proposal> refine_and_select(const std::vector<BBox>& anchors,
                                        const std::vector<BoxDelta>& deltas,
                                        const std::vector<double>& scores, int image_w,
                                        int image_h, std::size_t pre_nms_top_n,
                                        double nms_threshold, std::size_t post_nms_top_n);

// Inspection dump: x1,y1,x2,y2,score,label rows.
std::string anchors_csv(const std::vector<BBox>& boxes,
                        const std::vector<double>* scores = nullptr,
                        const std::vector<AnchorLabel>* labels = nullptr);

}  // namespace facet
