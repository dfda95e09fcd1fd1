#include "facet/losses.hpp"

#include "facet/errors.hpp"
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace facet {

double total_loss(const LossWeights& w, const LossComponents& c) {
  return w.alpha * c.rpn_class + w.beta * c.rpn_bbox + w.gamma * c.mrcnn_class +
         w.delta * c.mrcnn_bbox + w.epsilon * c.mrcnn_mask;
}

LossWeights scale_weights(const LossWeights& w, double n) {
  if (!(n > 0.0)) throw std::invalid_argument("scale_weights: n must be > 0");
  return {w.alpha * n, w.beta * n, w.gamma * n, w.delta * n, w.epsilon * n};
}

LossSeries parse_training_log(const std::string& csv, const LossWeights& weights) {
  LossSeries series;
  series.weights = weights;

  std::istringstream in(csv);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::map<int, EpochLosses> by_epoch;
  std::map<std::pair<int, std::string>, bool> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "epoch,split,rpn_class,rpn_bbox,mrcnn_class,mrcnn_bbox,mrcnn_mask") {
        throw parse_error_at(line_no, "unexpected header: " + line);
      }
      saw_header = true;
      continue;
    }
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw parse_error_at(line_no, "expected 7 fields");

    int epoch = 0;
    try {
      epoch = std::stoi(fields[0]);
    } catch (const std::exception&) {
      throw parse_error_at(line_no, "non-numeric epoch");
    }
    const std::string& split = fields[1];
    if (split != "train" && split != "val") {
      throw parse_error_at(line_no, "split must be train or val");
    }
    if (seen[{epoch, split}]) {
      throw parse_error_at(line_no, "duplicate row for epoch " + fields[0] + " split " + split);
    }
    seen[{epoch, split}] = true;

    LossComponents c;
    double* slots[5] = {&c.rpn_class, &c.rpn_bbox, &c.mrcnn_class, &c.mrcnn_bbox, &c.mrcnn_mask};
    for (int i = 0; i < 5; ++i) {
      double v = 0.0;
      try {
        v = std::stod(fields[static_cast<std::size_t>(i) + 2]);
      } catch (const std::exception&) {
        throw parse_error_at(line_no, "non-numeric loss value");
      }
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw parse_error_at(line_no, "negative or non-finite loss value");
      }
      *slots[i] = v;
    }

    EpochLosses& e = by_epoch[epoch];
    e.epoch = epoch;
    if (split == "train") {
      e.train = c;
      e.train_total = total_loss(weights, c);
    } else {
      e.val = c;
      e.val_total = total_loss(weights, c);
    }
  }
  if (!saw_header && line_no > 0) throw parse_error_at(1, "missing header");

  for (auto& [epoch, e] : by_epoch) series.epochs.push_back(e);
  return series;
}

std::optional<int> detect_overfit(const LossSeries& s, int window, double slope_tol) {
  if (window < 1) throw std::invalid_argument("detect_overfit: window must be >= 1");
  std::vector<const EpochLosses*> rows;
  for (const auto& e : s.epochs) {
    if (e.train && e.val) rows.push_back(&e);
  }
  if (rows.size() < static_cast<std::size_t>(2 * window)) {
    throw std::invalid_argument("detect_overfit: need at least 2*window epochs with val data");
  }

  auto ma = [&](const std::vector<const EpochLosses*>& r, std::size_t end, bool train) {
    double sum = 0.0;
    for (std::size_t i = end + 1 - static_cast<std::size_t>(window); i <= end; ++i) {
      sum += train ? r[i]->train_total : r[i]->val_total;
    }
    return sum / window;
  };

  for (std::size_t i = static_cast<std::size_t>(window); i < rows.size(); ++i) {
    double train_slope = ma(rows, i, true) - ma(rows, i - 1, true);
    double val_slope = ma(rows, i, false) - ma(rows, i - 1, false);
    if (train_slope < 0.0 && val_slope >= slope_tol) return rows[i]->epoch;
  }
  return std::nullopt;
}

int select_best_epoch(const LossSeries& s, BestEpochCriterion criterion,
                      const std::map<int, double>* metric_table) {
  if (s.epochs.empty()) throw std::invalid_argument("select_best_epoch: empty series");

  if (criterion == BestEpochCriterion::MaxExternalMetric) {
    if (!metric_table || metric_table->empty()) {
      throw std::invalid_argument("select_best_epoch: metric criterion needs a metric table");
    }
    int best_epoch = 0;
    double best = 0.0;
    bool first = true;
    for (const auto& [epoch, value] : *metric_table) {
      if (first || value > best) {  // map is epoch-ascending, ties keep the earlier
        best = value;
        best_epoch = epoch;
        first = false;
      }
    }
    return best_epoch;
  }

  bool use_train = criterion == BestEpochCriterion::MinTrainTotal;
  int best_epoch = 0;
  double best = 0.0;
  bool first = true;
  for (const auto& e : s.epochs) {
    if (use_train && !e.train) continue;
    if (!use_train && !e.val) continue;
    double v = use_train ? e.train_total : e.val_total;
    if (first || v < best) {
      best = v;
      best_epoch = e.epoch;
      first = false;
    }
  }
  if (first) throw std::invalid_argument("select_best_epoch: no rows for the chosen split");
  return best_epoch;
}

std::string selection_json(int epoch, BestEpochCriterion criterion, double value) {
  const char* name = criterion == BestEpochCriterion::MinTrainTotal ? "min_train_total"
                     : criterion == BestEpochCriterion::MinValTotal ? "min_val_total"
                                                                    : "max_external_metric";
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["criterion"] = name;
  j["value"] = value;
  return j.dump();
}

}  // namespace facet
