// Copyright 2026 The BoxBoost Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "boxboost/evalbench.hpp"

#include <cmath>
#include <cstdio>

#include "boxboost/error.hpp"
#include "boxboost/parallel.hpp"

namespace boxboost {

namespace {

void check_aligned(std::span<const ProbMap> preds, std::span<const BinaryMask> gts) {
  if (preds.empty()) throw Error(ErrorKind::kParameter, "evaluation needs at least one image");
  if (preds.size() != gts.size()) {
    throw Error(ErrorKind::kShape, "got " + std::to_string(preds.size()) + " predictions for " +
                                       std::to_string(gts.size()) + " ground-truth masks");
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!(preds[i].size() == gts[i].size())) {
      throw Error(ErrorKind::kShape, "item " + std::to_string(i) + ": prediction " +
                                         to_string(preds[i].size()) + " vs ground truth " +
                                         to_string(gts[i].size()));
    }
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

ImageScore score_image(const ProbMap& pred, const BinaryMask& gt, double threshold) {
  const BinaryMask p = binarize(pred, threshold);
  return {dice(p, gt), iou(p, gt)};
}

DatasetReport evaluate_dataset(std::span<const ProbMap> preds, std::span<const BinaryMask> gts,
                               double threshold, const std::string& name, unsigned workers) {
  check_aligned(preds, gts);
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::kParameter, "threshold must lie in [0,1]");
  }
  std::vector<ImageScore> scores(preds.size());
  parallel_for(preds.size(), workers,
               [&](std::size_t i) { scores[i] = score_image(preds[i], gts[i], threshold); });
  DatasetReport r;
  r.name = name;
  r.count = preds.size();
  for (const ImageScore& s : scores) {
    r.dice += s.dice;
    r.iou += s.iou;
  }
  r.dice /= static_cast<double>(r.count);
  r.iou /= static_cast<double>(r.count);
  return r;
}

WeightedAverage weighted_average(std::span<const DatasetReport> reports) {
  if (reports.empty()) throw Error(ErrorKind::kParameter, "no reports to average");
  double total = 0.0;
  WeightedAverage w;
  for (const DatasetReport& r : reports) {
    const double n = static_cast<double>(r.count);
    w.dice += r.dice * n;
    w.iou += r.iou * n;
    total += n;
  }
  if (total <= 0.0) throw Error(ErrorKind::kParameter, "reports carry no images");
  w.dice /= total;
  w.iou /= total;
  return w;
}

std::vector<double> default_thresholds(int n) {
  if (n < 2) throw Error(ErrorKind::kParameter, "threshold grid needs at least 2 points");
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = static_cast<double>(i) / (n - 1);
  return t;
}

ThresholdCurve threshold_curve(std::span<const ProbMap> preds, std::span<const BinaryMask> gts,
                               std::span<const double> thresholds, unsigned workers) {
  check_aligned(preds, gts);
  if (thresholds.empty()) throw Error(ErrorKind::kParameter, "empty threshold list");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0)) {
      throw Error(ErrorKind::kParameter, "thresholds must lie in [0,1]");
    }
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
      throw Error(ErrorKind::kParameter, "thresholds must be strictly ascending");
    }
  }
  // per_image[i][k] = dice of image i at threshold k; summed in index order.
  std::vector<std::vector<double>> per_image(preds.size());
  parallel_for(preds.size(), workers, [&](std::size_t i) {
    per_image[i].resize(thresholds.size());
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      per_image[i][k] = dice(binarize(preds[i], thresholds[k]), gts[i]);
    }
  });
  ThresholdCurve curve;
  curve.thresholds.assign(thresholds.begin(), thresholds.end());
  curve.dice.assign(thresholds.size(), 0.0);
  for (const auto& row : per_image) {
    for (std::size_t k = 0; k < row.size(); ++k) curve.dice[k] += row[k];
  }
  for (double& d : curve.dice) d /= static_cast<double>(preds.size());
  return curve;
}

double round_half_up(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  // The small nudge keeps values like 0.5605 (stored as 0.56049999...) rounding up.
  const double scaled = value * scale;
  const double nudged = scaled + (scaled >= 0 ? 1e-9 : -1e-9);
  return std::round(nudged) / scale;
}

std::string report_csv(std::span<const DatasetReport> reports) {
  std::string out = "dataset,count,dice,iou\n";
  std::size_t total = 0;
  for (const DatasetReport& r : reports) {
    out += r.name + "," + std::to_string(r.count) + "," + fmt(r.dice) + "," + fmt(r.iou) + "\n";
    total += r.count;
  }
  const WeightedAverage w = weighted_average(reports);
  out += "wAVG," + std::to_string(total) + "," + fmt(w.dice) + "," + fmt(w.iou) + "\n";
  return out;
}

std::string curve_csv(const ThresholdCurve& curve) {
  std::string out = "threshold,dice\n";
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k) {
    out += fmt(curve.thresholds[k]) + "," + fmt(curve.dice[k]) + "\n";
  }
  return out;
}

}  // namespace boxboost
