#include "facet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "facet/parallel.hpp"
#include "facet/rng.hpp"
#include "json.hpp"

namespace facet {

using ordered_json = nlohmann::ordered_json;

namespace {

Polygon box_polygon(const BBox& b) {
  return Polygon{{{b.x1, b.y1}, {b.x2, b.y1}, {b.x2, b.y2}, {b.x1, b.y2}}};
}

BBox payload_bbox(const DetectionPayload& payload) {
  if (const auto* poly = std::get_if<Polygon>(&payload)) return polygon_bbox(*poly);
  if (const auto* box = std::get_if<BBox>(&payload)) return *box;
  const auto& mask = std::get<BitMask>(payload);
  int minx = mask.width, miny = mask.height, maxx = -1, maxy = -1;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.get(x, y)) continue;
      minx = std::min(minx, x);
      miny = std::min(miny, y);
      maxx = std::max(maxx, x);
      maxy = std::max(maxy, y);
    }
  }
  if (maxx < 0) return {0, 0, 0, 0};
  return {static_cast<double>(minx), static_cast<double>(miny), static_cast<double>(maxx + 1),
          static_cast<double>(maxy + 1)};
}

BitMask payload_mask(const DetectionPayload& payload, int width, int height) {
  if (const auto* poly = std::get_if<Polygon>(&payload)) return rasterize(*poly, width, height);
  if (const auto* box = std::get_if<BBox>(&payload)) {
    return rasterize(box_polygon(*box), width, height);
  }
  const auto& mask = std::get<BitMask>(payload);
  if (mask.width != width || mask.height != height) {
    throw std::invalid_argument("mask payload dimensions do not match the image canvas");
  }
  return mask;
}

void grow_extent(double& w, double& h, const BBox& b) {
  w = std::max(w, b.x2);
  h = std::max(h, b.y2);
}

// Canvas for an image: resolved dimensions when available, otherwise the
// tight extent of everything drawn on it (adding empty canvas never changes
// any count, so the fallback is threshold-stable).
std::pair<int, int> effective_dims(const ImageRecord& rec,
                                   const std::vector<const Detection*>& preds) {
  if (rec.width > 0 && rec.height > 0) return {rec.width, rec.height};
  double w = 1.0, h = 1.0;
  for (const auto& region : rec.regions) grow_extent(w, h, polygon_bbox(region.polygon));
  for (const auto* det : preds) grow_extent(w, h, payload_bbox(det->payload));
  return {static_cast<int>(std::ceil(w)), static_cast<int>(std::ceil(h))};
}

struct ImageWork {
  const ImageRecord* record = nullptr;
  std::vector<const Detection*> preds;        // score-thresholded, input order
  std::vector<std::size_t> pred_input_index;  // global input index per pred
};

struct ImageOutcome {
  MatchResult match;
  ImageEval eval;
};

ImageOutcome evaluate_image(const ImageWork& work, const EvalConfig& cfg) {
  const ImageRecord& rec = *work.record;
  auto [w, h] = effective_dims(rec, work.preds);

  std::vector<Detection> preds;
  preds.reserve(work.preds.size());
  for (const auto* d : work.preds) preds.push_back(*d);

  ImageOutcome out;
  out.match = match_detections(preds, rec.regions, w, h, cfg);
  out.eval.image = rec.filename;
  out.eval.n_gt = rec.regions.size();
  out.eval.n_pred = preds.size();
  out.eval.counts = out.match.counts;
  out.eval.ap = rec.regions.empty()
                    ? 0.0
                    : average_precision(pr_curve(out.match.tp_flags, rec.regions.size()),
                                        cfg.ap_interp);

  BitMask gt_union(w, h);
  for (const auto& region : rec.regions) {
    BitMask m = rasterize(region.polygon, w, h);
    for (std::size_t i = 0; i < gt_union.words.size(); ++i) gt_union.words[i] |= m.words[i];
  }
  BitMask pred_union(w, h);
  for (const auto& det : preds) {
    BitMask m = payload_mask(det.payload, w, h);
    for (std::size_t i = 0; i < pred_union.words.size(); ++i) pred_union.words[i] |= m.words[i];
  }
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < gt_union.words.size(); ++i) {
    inter += static_cast<std::size_t>(std::popcount(gt_union.words[i] & pred_union.words[i]));
    uni += static_cast<std::size_t>(std::popcount(gt_union.words[i] | pred_union.words[i]));
  }
  out.eval.px_intersection = inter;
  out.eval.px_gt = gt_union.count();
  out.eval.px_union = uni;
  return out;
}

std::vector<ImageWork> group_by_image(const std::vector<Detection>& preds, const Dataset& dataset,
                                      double score_threshold,
                                      std::vector<std::string>* unknown_images) {
  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < dataset.images.size(); ++i) {
    index_of[dataset.images[i].filename] = i;
  }
  std::vector<ImageWork> work(dataset.images.size());
  for (std::size_t i = 0; i < dataset.images.size(); ++i) work[i].record = &dataset.images[i];

  std::set<std::string> unknown_seen;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const Detection& det = preds[i];
    auto it = index_of.find(det.image);
    if (it == index_of.end()) {
      if (unknown_images && unknown_seen.insert(det.image).second) {
        unknown_images->push_back(det.image);
      }
      continue;
    }
    if (det.score < score_threshold) continue;
    work[it->second].preds.push_back(&det);
    work[it->second].pred_input_index.push_back(i);
  }
  return work;
}

double f1_score(double precision, double recall) {
  double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

char const* iou_kind_name(IouKind k) { return k == IouKind::Mask ? "mask" : "box"; }
char const* ap_mode_name(ApMode m) {
  return m == ApMode::PerImageMean ? "per_image_mean" : "dataset_wide";
}
char const* ap_interp_name(ApInterp i) {
  switch (i) {
    case ApInterp::Sampled11: return "sampled_11";
    case ApInterp::Sampled101: return "sampled_101";
    default: return "all_point";
  }
}

}  // namespace

std::vector<Detection> load_predictions(const std::string& jsonl) {
  std::vector<Detection> out;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw parse_error_at(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw parse_error_at(line_no, "expected a JSON object");
    if (!j.contains("image") || !j["image"].is_string()) {
      throw parse_error_at(line_no, "missing \"image\" field");
    }
    if (!j.contains("score") || !j["score"].is_number()) {
      throw parse_error_at(line_no, "missing \"score\" field");
    }

    Detection det;
    det.image = j["image"].get<std::string>();
    det.class_name = j.value("class", std::string("window"));
    det.score = j["score"].get<double>();
    if (!(det.score >= 0.0 && det.score <= 1.0)) {
      throw parse_error_at(line_no, "score out of range [0, 1]");
    }

    int payload_keys = 0;
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key == "image" || key == "class" || key == "score") continue;
      if (key == "polygon") {
        ++payload_keys;
        if (!it.value().is_array() || it.value().size() < 3) {
          throw parse_error_at(line_no, "polygon needs >= 3 [x, y] pairs");
        }
        Polygon poly;
        for (const auto& pt : it.value()) {
          if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
            throw parse_error_at(line_no, "polygon points must be [x, y] pairs");
          }
          double x = pt[0].get<double>(), y = pt[1].get<double>();
          if (!std::isfinite(x) || !std::isfinite(y)) {
            throw parse_error_at(line_no, "non-finite polygon coordinate");
          }
          poly.points.push_back({x, y});
        }
        det.payload = std::move(poly);
      } else if (key == "bbox") {
        ++payload_keys;
        const auto& v = it.value();
        if (!v.is_array() || v.size() != 4 || !v[0].is_number() || !v[1].is_number() ||
            !v[2].is_number() || !v[3].is_number()) {
          throw parse_error_at(line_no, "bbox must be [x1, y1, x2, y2]");
        }
        BBox b{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
        if (!(b.x2 > b.x1 && b.y2 > b.y1)) {
          throw parse_error_at(line_no, "bbox is degenerate");
        }
        det.payload = b;
      } else if (key == "mask_pgm_path") {
        ++payload_keys;
        if (!it.value().is_string()) throw parse_error_at(line_no, "mask_pgm_path must be a string");
        std::ifstream mask_in(it.value().get<std::string>(), std::ios::binary);
        if (!mask_in) {
          throw parse_error_at(line_no, "cannot open mask file " + it.value().get<std::string>());
        }
        std::ostringstream buf;
        buf << mask_in.rdbuf();
        det.payload = parse_pgm(buf.str());
      } else {
        throw parse_error_at(line_no, "unknown payload key \"" + key + "\"");
      }
    }
    if (payload_keys != 1) {
      throw parse_error_at(line_no, "need exactly one of polygon/bbox/mask_pgm_path");
    }
    out.push_back(std::move(det));
  }
  return out;
}

std::string write_predictions(const std::vector<Detection>& dets) {
  std::string out;
  for (const auto& det : dets) {
    ordered_json j;
    j["image"] = det.image;
    j["class"] = det.class_name;
    j["score"] = det.score;
    if (const auto* poly = std::get_if<Polygon>(&det.payload)) {
      ordered_json pts = ordered_json::array();
      for (const auto& p : poly->points) pts.push_back(ordered_json::array({p.x, p.y}));
      j["polygon"] = std::move(pts);
    } else if (const auto* box = std::get_if<BBox>(&det.payload)) {
      j["bbox"] = ordered_json::array({box->x1, box->y1, box->x2, box->y2});
    } else {
      throw std::invalid_argument("write_predictions: mask payloads need a file, not JSONL");
    }
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

MatchResult match_detections(const std::vector<Detection>& preds, const std::vector<Region>& gts,
                             int width, int height, const EvalConfig& cfg) {
  MatchResult result;
  result.order.resize(preds.size());
  std::iota(result.order.begin(), result.order.end(), std::size_t{0});
  std::stable_sort(result.order.begin(), result.order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });

  // Pairwise IoU in the configured kind.
  std::vector<BitMask> gt_masks;
  std::vector<BBox> gt_boxes;
  if (cfg.iou_kind == IouKind::Mask) {
    gt_masks.reserve(gts.size());
    for (const auto& g : gts) gt_masks.push_back(rasterize(g.polygon, width, height));
  } else {
    gt_boxes.reserve(gts.size());
    for (const auto& g : gts) gt_boxes.push_back(polygon_bbox(g.polygon));
  }

  std::vector<bool> gt_used(gts.size(), false);
  result.tp_flags.resize(preds.size(), false);
  result.matched_iou.resize(preds.size(), 0.0);

  for (std::size_t rank = 0; rank < result.order.size(); ++rank) {
    const Detection& det = preds[result.order[rank]];
    double best = 0.0;
    std::ptrdiff_t best_gt = -1;
    if (cfg.iou_kind == IouKind::Mask) {
      BitMask m = payload_mask(det.payload, width, height);
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (gt_used[g]) continue;
        double iou = mask_iou(m, gt_masks[g]);
        if (iou > best) {
          best = iou;
          best_gt = static_cast<std::ptrdiff_t>(g);
        }
      }
    } else {
      BBox b = payload_bbox(det.payload);
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (gt_used[g]) continue;
        double iou = bbox_iou(b, gt_boxes[g]);
        if (iou > best) {
          best = iou;
          best_gt = static_cast<std::ptrdiff_t>(g);
        }
      }
    }
    if (best_gt >= 0 && best >= cfg.iou_threshold) {
      gt_used[static_cast<std::size_t>(best_gt)] = true;
      result.tp_flags[rank] = true;
      result.matched_iou[rank] = best;
      ++result.counts.tp;
    } else {
      ++result.counts.fp;
    }
  }
  result.counts.fn = gts.size() - result.counts.tp;
  return result;
}

std::pair<double, double> precision_recall(const MatchCounts& c) {
  double denom_p = static_cast<double>(c.tp + c.fp);
  double denom_r = static_cast<double>(c.tp + c.fn);
  double p = denom_p > 0.0 ? static_cast<double>(c.tp) / denom_p : 0.0;
  double r = denom_r > 0.0 ? static_cast<double>(c.tp) / denom_r : 0.0;
  return {p, r};
}

PRCurve pr_curve(const std::vector<bool>& ranked_tp_flags, std::size_t n_gt) {
  PRCurve curve;
  curve.reserve(ranked_tp_flags.size());
  std::size_t cum_tp = 0;
  for (std::size_t i = 0; i < ranked_tp_flags.size(); ++i) {
    if (ranked_tp_flags[i]) ++cum_tp;
    PRPoint pt;
    pt.precision = static_cast<double>(cum_tp) / static_cast<double>(i + 1);
    pt.recall = n_gt > 0 ? static_cast<double>(cum_tp) / static_cast<double>(n_gt) : 0.0;
    curve.push_back(pt);
  }
  return curve;
}

double average_precision(const PRCurve& curve, ApInterp interp) {
  if (curve.empty()) return 0.0;

  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }

  if (interp == ApInterp::AllPoint) {
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve[i].recall > prev_recall) {
        ap += (curve[i].recall - prev_recall) * envelope[i];
        prev_recall = curve[i].recall;
      }
    }
    return ap;
  }

  int samples = interp == ApInterp::Sampled11 ? 11 : 101;
  double acc = 0.0;
  for (int s = 0; s < samples; ++s) {
    double r = static_cast<double>(s) / (samples - 1);
    double best = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve[i].recall >= r) {
        best = envelope[i];
        break;
      }
    }
    acc += best;
  }
  return acc / samples;
}

EvalReport evaluate(const std::vector<Detection>& preds, const Dataset& dataset,
                    const EvalConfig& cfg, int jobs) {
  EvalReport report;
  report.config = cfg;

  std::vector<ImageWork> work =
      group_by_image(preds, dataset, cfg.score_threshold, &report.unknown_images);

  std::vector<ImageOutcome> outcomes(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) { outcomes[i] = evaluate_image(work[i], cfg); });

  // Aggregation runs in dataset image order regardless of thread schedule.
  std::size_t images_with_gt = 0;
  double ap_sum = 0.0;
  struct Pooled {
    double score;
    std::size_t input_index;
    bool tp;
  };
  std::vector<Pooled> pooled;
  std::size_t total_gt = 0;
  std::size_t px_inter = 0, px_gt = 0, px_union = 0;
  std::size_t images_with_gt_px = 0;
  double macro_sum = 0.0;

  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const ImageOutcome& oc = outcomes[i];
    report.per_image.push_back(oc.eval);
    report.counts.tp += oc.eval.counts.tp;
    report.counts.fp += oc.eval.counts.fp;
    report.counts.fn += oc.eval.counts.fn;
    total_gt += oc.eval.n_gt;
    if (oc.eval.n_gt > 0) {
      ++images_with_gt;
      ap_sum += oc.eval.ap;
    }
    for (std::size_t rank = 0; rank < oc.match.order.size(); ++rank) {
      std::size_t local = oc.match.order[rank];
      pooled.push_back({work[i].preds[local]->score, work[i].pred_input_index[local],
                        oc.match.tp_flags[rank]});
    }
    px_inter += oc.eval.px_intersection;
    px_gt += oc.eval.px_gt;
    px_union += oc.eval.px_union;
    if (oc.eval.px_gt > 0) {
      ++images_with_gt_px;
      macro_sum += static_cast<double>(oc.eval.px_intersection) /
                   static_cast<double>(oc.eval.px_gt);
    }
  }

  std::sort(pooled.begin(), pooled.end(), [](const Pooled& a, const Pooled& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.input_index < b.input_index;
  });
  std::vector<bool> pooled_flags;
  pooled_flags.reserve(pooled.size());
  for (const auto& p : pooled) pooled_flags.push_back(p.tp);

  report.map_dataset_wide = average_precision(pr_curve(pooled_flags, total_gt), cfg.ap_interp);
  report.map_per_image_mean = images_with_gt > 0 ? ap_sum / static_cast<double>(images_with_gt) : 0.0;
  report.map = cfg.ap_mode == ApMode::PerImageMean ? report.map_per_image_mean
                                                   : report.map_dataset_wide;

  auto [precision, recall] = precision_recall(report.counts);
  report.precision = precision;
  report.recall = recall;
  report.f1 = f1_score(precision, recall);

  report.pixel_accuracy.defined = px_gt > 0;
  if (px_gt > 0) {
    report.pixel_accuracy.micro = static_cast<double>(px_inter) / static_cast<double>(px_gt);
    report.pixel_accuracy.macro =
        images_with_gt_px > 0 ? macro_sum / static_cast<double>(images_with_gt_px) : 0.0;
    report.pixel_accuracy.symmetric_iou =
        px_union > 0 ? static_cast<double>(px_inter) / static_cast<double>(px_union) : 0.0;
  }

  if (cfg.iou_threshold == 0.5) {
    report.ap50 = report.map;
  } else {
    EvalConfig cfg50 = cfg;
    cfg50.iou_threshold = 0.5;
    report.ap50 = evaluate(preds, dataset, cfg50, jobs).map;
  }
  return report;
}

PixelAccuracyReport pixel_accuracy(const std::vector<Detection>& preds, const Dataset& dataset,
                                   const EvalConfig& cfg, int jobs) {
  return evaluate(preds, dataset, cfg, jobs).pixel_accuracy;
}

std::vector<SweepRow> sweep_confidence(const std::vector<Detection>& preds, const Dataset& dataset,
                                       EvalConfig cfg, const std::vector<double>& thresholds,
                                       int jobs) {
  for (double t : thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument("sweep_confidence: threshold outside [0, 1]");
    }
  }
  std::vector<SweepRow> rows;
  rows.reserve(thresholds.size());
  for (double t : thresholds) {
    cfg.score_threshold = t;
    EvalReport r = evaluate(preds, dataset, cfg, jobs);
    rows.push_back({t, r.precision, r.recall, r.f1, r.map});
  }
  return rows;
}

std::vector<Detection> synth_predictions(const Dataset& dataset, const PerturbSpec& spec) {
  auto in_01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_01(spec.drop_rate) || !in_01(spec.spurious_rate) || !in_01(spec.score_noise)) {
    throw std::invalid_argument("synth_predictions: rates must lie in [0, 1]");
  }
  if (spec.jitter_px < 0.0) throw std::invalid_argument("synth_predictions: negative jitter");

  std::vector<Detection> out;
  for (const auto& img : dataset.images) {
    double canvas_w = img.width > 0 ? img.width : 0.0;
    double canvas_h = img.height > 0 ? img.height : 0.0;
    if (canvas_w <= 0.0 || canvas_h <= 0.0) {
      for (const auto& region : img.regions) {
        BBox b = polygon_bbox(region.polygon);
        canvas_w = std::max(canvas_w, b.x2);
        canvas_h = std::max(canvas_h, b.y2);
      }
      canvas_w = std::max(canvas_w, 1.0);
      canvas_h = std::max(canvas_h, 1.0);
    }

    std::uint64_t image_seed = derive_seed(spec.seed, img.filename);
    for (std::size_t r = 0; r < img.regions.size(); ++r) {
      // One stateless stream per region: the drop decision, jitter and
      // score draws never shift when other regions appear or vanish.
      SplitMix64 rng(derive_seed(image_seed, "region-" + std::to_string(r)));
      double u_drop = rng.next_unit();
      double score = 1.0 - spec.score_noise * rng.next_unit();
      Polygon poly = img.regions[r].polygon;
      for (auto& pt : poly.points) {
        pt.x += rng.next_range(-spec.jitter_px, spec.jitter_px);
        pt.y += rng.next_range(-spec.jitter_px, spec.jitter_px);
      }
      double u_spurious = rng.next_unit();
      double sp_cx = rng.next_range(0.0, canvas_w);
      double sp_cy = rng.next_range(0.0, canvas_h);
      double sp_w = rng.next_range(0.05 * canvas_w, 0.25 * canvas_w);
      double sp_h = rng.next_range(0.05 * canvas_h, 0.25 * canvas_h);
      double sp_score = rng.next_range(0.05, 0.5);

      if (u_drop >= spec.drop_rate) {
        out.push_back({img.filename, img.regions[r].class_name(), score, std::move(poly)});
      }
      if (u_spurious < spec.spurious_rate) {
        BBox b{sp_cx - 0.5 * sp_w, sp_cy - 0.5 * sp_h, sp_cx + 0.5 * sp_w, sp_cy + 0.5 * sp_h};
        b = clip_box(b, canvas_w, canvas_h);
        if (b.area() > 0.0) {
          out.push_back({img.filename, img.regions[r].class_name(), sp_score, b});
        }
      }
    }
  }
  return out;
}

std::string report_json(const EvalReport& report) {
  ordered_json j;
  j["config"] = {{"iou_threshold", report.config.iou_threshold},
                 {"iou_kind", iou_kind_name(report.config.iou_kind)},
                 {"score_threshold", report.config.score_threshold},
                 {"ap_mode", ap_mode_name(report.config.ap_mode)},
                 {"ap_interp", ap_interp_name(report.config.ap_interp)}};
  j["counts"] = {{"tp", report.counts.tp}, {"fp", report.counts.fp}, {"fn", report.counts.fn}};
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["ap50"] = report.ap50;
  j["map"] = report.map;
  j["map_per_image_mean"] = report.map_per_image_mean;
  j["map_dataset_wide"] = report.map_dataset_wide;
  if (report.pixel_accuracy.defined) {
    j["pixel_accuracy"] = {{"micro", report.pixel_accuracy.micro},
                           {"macro", report.pixel_accuracy.macro},
                           {"symmetric_iou", report.pixel_accuracy.symmetric_iou},
                           {"defined", true}};
  } else {
    j["pixel_accuracy"] = {{"micro", nullptr},
                           {"macro", nullptr},
                           {"symmetric_iou", nullptr},
                           {"defined", false}};
  }
  ordered_json per_image = ordered_json::array();
  for (const auto& row : report.per_image) {
    ordered_json r;
    r["image"] = row.image;
    r["n_gt"] = row.n_gt;
    r["n_pred"] = row.n_pred;
    r["tp"] = row.counts.tp;
    r["fp"] = row.counts.fp;
    r["fn"] = row.counts.fn;
    if (row.n_gt > 0) {
      r["ap"] = row.ap;
    } else {
      r["ap"] = nullptr;
    }
    if (row.px_gt > 0) {
      r["pixel_accuracy"] =
          static_cast<double>(row.px_intersection) / static_cast<double>(row.px_gt);
    } else {
      r["pixel_accuracy"] = nullptr;
    }
    per_image.push_back(std::move(r));
  }
  j["per_image"] = std::move(per_image);
  j["unknown_images"] = report.unknown_images;
  return j.dump(2);
}

std::string report_csv(const EvalReport& report) {
  std::string out = "image,n_gt,n_pred,tp,fp,fn,ap,pixel_accuracy\n";
  char buf[256];
  for (const auto& row : report.per_image) {
    std::string ap = "";
    if (row.n_gt > 0) {
      std::snprintf(buf, sizeof(buf), "%.9g", row.ap);
      ap = buf;
    }
    std::string px = "";
    if (row.px_gt > 0) {
      std::snprintf(buf, sizeof(buf), "%.9g",
                    static_cast<double>(row.px_intersection) / static_cast<double>(row.px_gt));
      px = buf;
    }
    std::snprintf(buf, sizeof(buf), "%s,%zu,%zu,%zu,%zu,%zu,%s,%s\n", row.image.c_str(), row.n_gt,
                  row.n_pred, row.counts.tp, row.counts.fp, row.counts.fn, ap.c_str(), px.c_str());
    out += buf;
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "threshold,precision,recall,f1,map\n";
  char buf[192];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g\n", r.threshold, r.precision,
                  r.recall, r.f1, r.map);
    out += buf;
  }
  return out;
}

}  // namespace facet
