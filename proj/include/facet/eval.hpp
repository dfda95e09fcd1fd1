#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "facet/annotations.hpp"
#include "facet/geometry.hpp"

namespace facet {

using DetectionPayload = std::variant<Polygon, BBox, BitMask>;

// One predicted instance.
struct Detection {
  std::string image;
  std::string class_name = "window";
  double score = 0.0;
  DetectionPayload payload;
};

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

enum class IouKind { Mask, Box };
enum class ApMode { PerImageMean, DatasetWide };
enum class ApInterp { AllPoint, Sampled11, Sampled101 };

struct EvalConfig {
  double iou_threshold = 0.5;
  IouKind iou_kind = IouKind::Mask;
  double score_threshold = 0.9;
  ApMode ap_mode = ApMode::PerImageMean;
  ApInterp ap_interp = ApInterp::AllPoint;
};

struct PRPoint {
  double precision = 0.0;
  double recall = 0.0;
};

using PRCurve = std::vector<PRPoint>;

// Matching output for one image. Flags/ious are in rank order (descending
// score, ties by input order); `order` maps rank -> index into the input
// prediction list.
struct MatchResult {
  MatchCounts counts;
  std::vector<bool> tp_flags;
  std::vector<double> matched_iou;
  std::vector<std::size_t> order;
};

struct ImageEval {
  std::string image;
  std::size_t n_gt = 0;
  std::size_t n_pred = 0;
  MatchCounts counts;
  double ap = 0.0;
  // pixel tallies for the accuracy aggregates
  std::size_t px_intersection = 0;
  std::size_t px_gt = 0;
  std::size_t px_union = 0;
};

struct PixelAccuracyReport {
  bool defined = false;       // false when no gt pixels exist anywhere
  double micro = 0.0;         // sum(inter) / sum(gt)
  double macro = 0.0;         // mean over images with gt pixels
  double symmetric_iou = 0.0; // sum(inter) / sum(union)
};

struct EvalReport {
  EvalConfig config;
  MatchCounts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ap50 = 0.0;
  double map = 0.0;  // the configured ap_mode's value
  double map_per_image_mean = 0.0;
  double map_dataset_wide = 0.0;
  PixelAccuracyReport pixel_accuracy;
  std::vector<ImageEval> per_image;
  std::vector<std::string> unknown_images;
};

// Perturbation knobs for the synthetic-prediction harness. Region-level
// randomness is a pure function of (seed, image, region), so raising
// drop_rate only grows the dropped set; it never reshuffles survivors.
struct PerturbSpec {
  double drop_rate = 0.0;
  double spurious_rate = 0.0;
  double jitter_px = 0.0;
  double score_noise = 0.0;
  std::uint64_t seed = 0;
};

// JSONL, one object per line: {"image", "class", "score", and one of
// "polygon" ([[x,y],...]), "bbox" ([x1,y1,x2,y2]) or "mask_pgm_path"}.
std::vector<Detection> load_predictions(const std::string& jsonl);
std::string write_predictions(const std::vector<Detection>& dets);

// Greedy score-ordered matching with single-use ground truths at the
// configured IoU threshold/kind. Predictions must already belong to this
// image and pass the score threshold.
MatchResult match_detections(const std::vector<Detection>& preds, const std::vector<Region>& gts,
                             int width, int height, const EvalConfig& cfg);

// Standalone P/R from counts: zero-prediction P is 0 here (the PR-curve
// rank bootstrap handles its own 0/0 case internally).
std::pair<double, double> precision_recall(const MatchCounts& c);

PRCurve pr_curve(const std::vector<bool>& ranked_tp_flags, std::size_t n_gt);

// Area under the precision envelope: sum over ranks of
// (R_i - R_{i-1}) * max_{j>=i} P_j. Sampled 11/101-point modes are for
// cross-tool comparison only.
double average_precision(const PRCurve& curve, ApInterp interp = ApInterp::AllPoint);

EvalReport evaluate(const std::vector<Detection>& preds, const Dataset& dataset,
                    const EvalConfig& cfg, int jobs = 1);

// Ground-truth pixel recall plus the co-reported aggregates, over
// score-thresholded predictions.
PixelAccuracyReport pixel_accuracy(const std::vector<Detection>& preds, const Dataset& dataset,
                                   const EvalConfig& cfg, int jobs = 1);

struct SweepRow {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double map = 0.0;
};

std::vector<SweepRow> sweep_confidence(const std::vector<Detection>& preds, const Dataset& dataset,
                                       EvalConfig cfg, const std::vector<double>& thresholds,
                                       int jobs = 1);

std::vector<Detection> synth_predictions(const Dataset& dataset, const PerturbSpec& spec);

std::string report_json(const EvalReport& report);
std::string report_csv(const EvalReport& report);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace facet
