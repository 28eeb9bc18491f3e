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

// Segmentation metric aggregation: per-dataset mean Dice/IoU, image-count
// weighted averages across datasets, and Dice-vs-threshold curves.

#ifndef BOXBOOST_EVALBENCH_HPP_
#define BOXBOOST_EVALBENCH_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "boxboost/mask.hpp"

namespace boxboost {

struct DatasetReport {
  std::string name;
  std::size_t count = 0;
  double dice = 0.0;
  double iou = 0.0;
};

struct WeightedAverage {
  double dice = 0.0;
  double iou = 0.0;
};

struct ThresholdCurve {
  std::vector<double> thresholds;
  std::vector<double> dice;
};

/// Per-image dice/iou of binarize(pred, threshold) against gt.
struct ImageScore {
  double dice = 0.0;
  double iou = 0.0;
};
ImageScore score_image(const ProbMap& pred, const BinaryMask& gt, double threshold);

/// Mean per-image Dice and IoU. Empty input throws kParameter; a size
/// mismatch throws kShape naming the item index.
DatasetReport evaluate_dataset(std::span<const ProbMap> preds, std::span<const BinaryMask> gts,
                               double threshold = 0.5, const std::string& name = "test",
                               unsigned workers = 1);

/// sum(metric * count) / sum(count). Empty input or zero total count throws
/// kParameter.
WeightedAverage weighted_average(std::span<const DatasetReport> reports);

/// n evenly spaced thresholds i / (n - 1), i = 0..n-1.
std::vector<double> default_thresholds(int n = 256);

/// Mean Dice at each threshold (strictly ascending within [0, 1]).
ThresholdCurve threshold_curve(std::span<const ProbMap> preds, std::span<const BinaryMask> gts,
                               std::span<const double> thresholds, unsigned workers = 1);

/// Rounds half away from zero to `digits` decimals.
double round_half_up(double value, int digits = 3);

/// One row per dataset followed by a "wAVG" row; header
/// dataset,count,dice,iou. Values are printed with 6 decimals.
std::string report_csv(std::span<const DatasetReport> reports);
/// Header threshold,dice.
std::string curve_csv(const ThresholdCurve& curve);

}  // namespace boxboost

#endif  // BOXBOOST_EVALBENCH_HPP_
