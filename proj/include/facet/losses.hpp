#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace facet {

// Multi-task loss weights; strictly positive.
struct LossWeights {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double delta = 1.0;
  double epsilon = 1.0;
};

// The five per-stage training losses, taken as inputs (producing them
// requires a live network; this layer is the bookkeeping around them).
struct LossComponents {
  double rpn_class = 0.0;
  double rpn_bbox = 0.0;
  double mrcnn_class = 0.0;
  double mrcnn_bbox = 0.0;
  double mrcnn_mask = 0.0;
};

struct EpochLosses {
  int epoch = 0;
  std::optional<LossComponents> train;
  std::optional<LossComponents> val;
  double train_total = 0.0;
  double val_total = 0.0;
};

struct LossSeries {
  LossWeights weights;
  std::vector<EpochLosses> epochs;  // strictly increasing epoch index
};

double total_loss(const LossWeights& w, const LossComponents& c);

// Multiply every weight by n > 0. Epoch rankings by total are invariant
// under this family.
LossWeights scale_weights(const LossWeights& w, double n);

// CSV with header epoch,split,rpn_class,rpn_bbox,mrcnn_class,mrcnn_bbox,
// mrcnn_mask; split is train or val. Totals are computed with the supplied
// weights. Duplicate (epoch, split) rows and negative losses are errors.
LossSeries parse_training_log(const std::string& csv, const LossWeights& weights = {});

// First epoch whose trailing moving-average slope shows the train total
// still falling while the val total stagnates or rises. Slope at index i is
// ma(i) - ma(i-1) over a window of `window` epochs. Returns the epoch
// number, or nullopt if the pattern never appears. Needs >= 2*window epochs
// carrying val data.
std::optional<int> detect_overfit(const LossSeries& s, int window = 3, double slope_tol = 0.0);

enum class BestEpochCriterion { MinTrainTotal, MinValTotal, MaxExternalMetric };

// Argmin/argmax with earliest-epoch tie-break. The metric criterion reads
// from an external epoch -> value table.
int select_best_epoch(const LossSeries& s, BestEpochCriterion criterion,
                      const std::map<int, double>* metric_table = nullptr);

// One-line JSON {"epoch":..,"criterion":..,"value":..}.
std::string selection_json(int epoch, BestEpochCriterion criterion, double value);

}  // namespace facet
