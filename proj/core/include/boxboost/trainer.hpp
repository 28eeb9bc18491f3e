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

// Training loops.
//
// Single-network training minimises BCE + Dice over the certain pixels of
// each label map (all pixels for mask-annotated items). Dual training runs
// two networks on identical augmented batches and minimises the combined
// objective from losses.hpp, optionally with the consistency term on
// uncertain pixels.
//
// Batches mix mask-annotated and box-annotated items 1:1 when both sets are
// nonempty. Per-item gradients are reduced in batch-slot order, so results
// do not depend on the worker count.

#ifndef BOXBOOST_TRAINER_HPP_
#define BOXBOOST_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "boxboost/adamw.hpp"
#include "boxboost/image_io.hpp"
#include "boxboost/mask.hpp"
#include "boxboost/network.hpp"

namespace boxboost {

struct TrainConfig {
  int epochs = 20;
  int batch = 8;
  /// 0 derives the epoch length from the data (see resolve_steps_per_epoch).
  int steps_per_epoch = 0;
  /// Desk-scale step size for from-scratch training; AdamWConfig keeps 1e-4.
  AdamWConfig adamw{.lr = 2e-3};
  bool augment = true;
  std::uint64_t seed = 0;
  unsigned workers = 0;

  void validate() const;
};

/// Steps needed to present every box-split record once at the 1:1 mixing
/// ratio, or every mask record once when the box split is empty.
int resolve_steps_per_epoch(const TrainConfig& cfg, std::size_t mask_items,
                            std::size_t box_split_size);

struct TrainSample {
  std::string id;
  Tensor<float> image;  // {1, H, W}
  TriLabelMask labels;
};

/// (v - 128) / 64, one channel.
Tensor<float> to_tensor(const GrayImage& image);

struct TrainLogRow {
  std::uint64_t step = 0;
  double loss = 0.0;
  double bce_r = 0.0;
  double dice_r = 0.0;
  double bce_p = 0.0;
  double dice_p = 0.0;
  double ic = 0.0;
};

/// Header step,loss,bce_r,dice_r,bce_p,dice_p,ic; fixed 9-digit precision.
std::string train_log_csv(std::span<const TrainLogRow> rows);

using TrainObserver = std::function<void(const TrainLogRow&)>;

/// Trains `net` for cfg.epochs * steps_per_epoch steps. Only the `bce_r` and
/// `dice_r` columns of the log are populated.
std::vector<TrainLogRow> train_single(Network<float>& net, std::span<const TrainSample> mask_items,
                                      std::span<const TrainSample> box_items,
                                      const TrainConfig& cfg, int steps_per_epoch,
                                      const TrainObserver& observer = {});

std::vector<TrainLogRow> train_dual(Network<float>& net_r, Network<float>& net_p,
                                    std::span<const TrainSample> mask_items,
                                    std::span<const TrainSample> box_items,
                                    const TrainConfig& cfg, int steps_per_epoch,
                                    bool consistency, const TrainObserver& observer = {});

/// sigmoid(forward(image)).
ProbMap predict(const Network<float>& net, const Tensor<float>& image);

}  // namespace boxboost

#endif  // BOXBOOST_TRAINER_HPP_
