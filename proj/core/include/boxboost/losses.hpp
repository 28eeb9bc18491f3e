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

// Region-masked segmentation losses with analytic gradients.
//
// Every loss takes a RegionMask selecting the pixels that contribute. An
// empty region yields value 0 and an all-zero gradient. Gradients are exactly
// zero outside the region.

#ifndef BOXBOOST_LOSSES_HPP_
#define BOXBOOST_LOSSES_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "boxboost/mask.hpp"

namespace boxboost {

/// Binary {0,1} pixel selector.
using RegionMask = BinaryMask;

/// C x H x W real tensor, channel-major. Values must stay finite.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int channels, ImageSize size, double fill = 0.0);
  FeatureMap(int channels, ImageSize size, std::vector<double> values);

  /// 1-channel copy of a probability map.
  static FeatureMap from_prob(const ProbMap& prob);

  int channels() const { return channels_; }
  const ImageSize& size() const { return size_; }
  std::size_t numel() const { return values_.size(); }

  double at(int c, int y, int x) const { return values_[offset(c, y, x)]; }
  double& at(int c, int y, int x) { return values_[offset(c, y, x)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool same_shape(const FeatureMap& other) const {
    return channels_ == other.channels_ && size_ == other.size_;
  }
  bool all_finite() const;

  bool operator==(const FeatureMap&) const = default;

 private:
  std::size_t offset(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * size_.height + y) * size_.width + x;
  }

  int channels_ = 0;
  ImageSize size_;
  std::vector<double> values_;
};

struct LossResult {
  double value = 0.0;
  /// One gradient per differentiable input, in argument order.
  std::vector<FeatureMap> gradients;
};

inline constexpr double kBceEpsilon = 1e-7;
inline constexpr double kDiceSmoothing = 1.0;

/// Mean binary cross entropy over active pixels, with the prediction clamped
/// to [kBceEpsilon, 1 - kBceEpsilon]. Gradient is w.r.t. the unclamped
/// prediction (zero where the clamp is active).
LossResult bce_loss(const ProbMap& pred, const BinaryMask& target,
                    const RegionMask& region);

/// 1 - (2 sum(p t) + s) / (sum(p) + sum(t) + s), sums over active pixels,
/// s = kDiceSmoothing.
LossResult dice_loss(const ProbMap& pred, const BinaryMask& target,
                     const RegionMask& region);

/// Masked squared feature distance: sum (f_r - f_p)^2 U / sum U, additionally
/// averaged over channels. Gradients w.r.t. both f_r and f_p (no stop-gradient).
LossResult ic_loss(const FeatureMap& f_r, const FeatureMap& f_p, const RegionMask& u);

struct TotalLossTerms {
  double bce_r = 0.0;
  double dice_r = 0.0;
  double bce_p = 0.0;
  double dice_p = 0.0;
  double ic = 0.0;

  double sum() const { return bce_r + dice_r + bce_p + dice_p + ic; }
};

struct TotalLossResult {
  double value = 0.0;
  TotalLossTerms terms;
  FeatureMap grad_pred_r;
  FeatureMap grad_pred_p;
  FeatureMap grad_f_r;
  FeatureMap grad_f_p;
};

struct TotalLossOptions {
  /// When false the consistency term and its gradients are omitted.
  bool consistency = true;
};

/// BCE + Dice on both predictions over the certain region FG u BG (targets are
/// the FG pixels), plus the consistency loss over the UNCERTAIN region.
TotalLossResult total_loss(const ProbMap& pred_r, const ProbMap& pred_p,
                           const FeatureMap& f_r, const FeatureMap& f_p,
                           const TriLabelMask& pseudo, TotalLossOptions options = {});

}  // namespace boxboost

#endif  // BOXBOOST_LOSSES_HPP_
