#include "facet/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace facet {

std::vector<BBox> generate_anchors(const AnchorConfig& cfg, int fmap_w, int fmap_h,
                                   int image_w, int image_h) {
  if (fmap_w <= 0 || fmap_h <= 0 || image_w <= 0 || image_h <= 0) {
    throw std::invalid_argument("generate_anchors: non-positive dimensions");
  }
  if (cfg.scales.empty() || cfg.ratios.empty()) {
    throw std::invalid_argument("generate_anchors: scales/ratios must be non-empty");
  }
  std::vector<BBox> anchors;
  anchors.reserve(static_cast<std::size_t>(fmap_w) * fmap_h * cfg.k());
  for (int cy = 0; cy < fmap_h; ++cy) {
    double yc = (cy + 0.5) * cfg.stride;
    for (int cx = 0; cx < fmap_w; ++cx) {
      double xc = (cx + 0.5) * cfg.stride;
      for (double scale : cfg.scales) {
        for (double ratio : cfg.ratios) {
          double w = scale * std::sqrt(ratio);
          double h = scale / std::sqrt(ratio);
          anchors.push_back({xc - 0.5 * w, yc - 0.5 * h, xc + 0.5 * w, yc + 0.5 * h});
        }
      }
    }
  }
  return anchors;
}

std::vector<AnchorLabel> assign_anchors(const std::vector<BBox>& anchors,
                                        const std::vector<BBox>& gt_boxes, double pos_iou,
                                        double neg_iou) {
  if (!(neg_iou >= 0.0 && neg_iou < pos_iou && pos_iou <= 1.0)) {
    throw std::invalid_argument("assign_anchors: need 0 <= neg_iou < pos_iou <= 1");
  }
  std::vector<AnchorLabel> labels(anchors.size());
  if (gt_boxes.empty()) {
    for (auto& l : labels) l = {AnchorClass::Background, -1};
    return labels;
  }

  std::vector<double> gt_best(gt_boxes.size(), 0.0);
  std::vector<int> gt_argmax(gt_boxes.size(), -1);

  for (std::size_t a = 0; a < anchors.size(); ++a) {
    double best = 0.0;
    int best_gt = -1;
    for (std::size_t g = 0; g < gt_boxes.size(); ++g) {
      double iou = bbox_iou(anchors[a], gt_boxes[g]);
      if (iou > best) {
        best = iou;
        best_gt = static_cast<int>(g);
      }
      if (iou > gt_best[g]) {
        gt_best[g] = iou;
        gt_argmax[g] = static_cast<int>(a);
      }
    }
    if (best >= pos_iou) {
      labels[a] = {AnchorClass::Foreground, best_gt};
    } else if (best < neg_iou) {
      labels[a] = {AnchorClass::Background, -1};
    } else {
      labels[a] = {AnchorClass::Ignore, -1};
    }
  }

  // Each gt with any overlap keeps its argmax anchor as a positive even
  // below pos_iou, so small objects cannot end up with zero positives.
  for (std::size_t g = 0; g < gt_boxes.size(); ++g) {
    if (gt_argmax[g] >= 0 && gt_best[g] > 0.0) {
      auto& label = labels[static_cast<std::size_t>(gt_argmax[g])];
      if (label.cls != AnchorClass::Foreground) {
        label = {AnchorClass::Foreground, static_cast<int>(g)};
      }
    }
  }
  return labels;
}

std::vector<std::size_t> nms(const std::vector<Proposal>& proposals, double iou_threshold) {
  for (const auto& p : proposals) {
    if (!(p.score >= 0.0 && p.score <= 1.0)) {
      throw std::invalid_argument("nms: score outside [0, 1]");
    }
  }
  std::vector<std::size_t> order(proposals.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return proposals[a].score > proposals[b].score;
  });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    bool suppressed = false;
    for (std::size_t k : kept) {
      if (bbox_iou(proposals[idx].box, proposals[k].box) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(idx);
  }
  return kept;
}

std::vector<Proposal> refine_and_select(const std::vector<BBox>& anchors,
                                        const std::vector<BoxDelta>& deltas,
                                        const std::vector<double>& scores, int image_w,
                                        int image_h, std::size_t pre_nms_top_n,
                                        double nms_threshold, std::size_t post_nms_top_n) {
  if (anchors.size() != deltas.size() || anchors.size() != scores.size()) {
    throw std::invalid_argument("refine_and_select: anchors/deltas/scores length mismatch");
  }
  std::vector<Proposal> refined(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    refined[i].box = clip_box(decode_delta(anchors[i], deltas[i]),
                              static_cast<double>(image_w), static_cast<double>(image_h));
    refined[i].score = scores[i];
  }

  std::vector<std::size_t> order(refined.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  if (order.size() > pre_nms_top_n) order.resize(pre_nms_top_n);

  std::vector<Proposal> candidates;
  candidates.reserve(order.size());
  for (std::size_t i : order) candidates.push_back(refined[i]);

  std::vector<std::size_t> kept = nms(candidates, nms_threshold);
  if (kept.size() > post_nms_top_n) kept.resize(post_nms_top_n);

  std::vector<Proposal> out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(candidates[i]);
  return out;
}

std::string anchors_csv(const std::vector<BBox>& boxes, const std::vector<double>* scores,
                        const std::vector<AnchorLabel>* labels) {
  auto label_name = [](const AnchorLabel& l) {
    switch (l.cls) {
      case AnchorClass::Foreground: return "foreground";
      case AnchorClass::Background: return "background";
      default: return "ignore";
    }
  };
  std::string out = "x1,y1,x2,y2,score,label\n";
  char buf[192];
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    double score = scores && i < scores->size() ? (*scores)[i] : 0.0;
    const char* label = labels && i < labels->size() ? label_name((*labels)[i]) : "none";
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%s\n", boxes[i].x1, boxes[i].y1,
                  boxes[i].x2, boxes[i].y2, score, label);
    out += buf;
  }
  return out;
}

}  // namespace facet
