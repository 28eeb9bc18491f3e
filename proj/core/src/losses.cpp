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

#include "boxboost/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "boxboost/error.hpp"

namespace boxboost {

namespace {

void require(bool ok, const char* op, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kShape, std::string(op) + ": " + what);
}

void check_pred_target_region(const ProbMap& pred, const BinaryMask& target,
                              const RegionMask& region, const char* op) {
  require(pred.size() == target.size(), op,
          "prediction " + to_string(pred.size()) + " vs target " + to_string(target.size()));
  require(pred.size() == region.size(), op,
          "prediction " + to_string(pred.size()) + " vs region " + to_string(region.size()));
}

}  // namespace

FeatureMap::FeatureMap(int channels, ImageSize size, double fill)
    : channels_(channels), size_(size) {
  validate(size);
  if (channels < 1) throw Error(ErrorKind::kParameter, "FeatureMap: channels must be >= 1");
  values_.assign(static_cast<std::size_t>(channels) * size.pixels(), fill);
}

FeatureMap::FeatureMap(int channels, ImageSize size, std::vector<double> values)
    : channels_(channels), size_(size), values_(std::move(values)) {
  validate(size);
  if (channels < 1) throw Error(ErrorKind::kParameter, "FeatureMap: channels must be >= 1");
  if (values_.size() != static_cast<std::size_t>(channels) * size.pixels()) {
    throw Error(ErrorKind::kShape, "FeatureMap: value count does not match C*H*W");
  }
}

FeatureMap FeatureMap::from_prob(const ProbMap& prob) {
  const auto v = prob.values();
  return FeatureMap(1, prob.size(), std::vector<double>(v.begin(), v.end()));
}

bool FeatureMap::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

LossResult bce_loss(const ProbMap& pred, const BinaryMask& target,
                    const RegionMask& region) {
  check_pred_target_region(pred, target, region, "bce_loss");
  LossResult out;
  out.gradients.emplace_back(1, pred.size(), 0.0);
  const std::size_t active = region.count();
  if (active == 0) return out;

  const double inv_n = 1.0 / static_cast<double>(active);
  const auto p = pred.values();
  const auto t = target.bits();
  const auto r = region.bits();
  auto g = out.gradients[0].values();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!r[i]) continue;
    const double ph = std::clamp(p[i], kBceEpsilon, 1.0 - kBceEpsilon);
    if (t[i]) {
      sum -= std::log(ph);
    } else {
      sum -= std::log1p(-ph);
    }
    const bool clamped = p[i] < kBceEpsilon || p[i] > 1.0 - kBceEpsilon;
    if (!clamped) {
      g[i] = (t[i] ? -1.0 / ph : 1.0 / (1.0 - ph)) * inv_n;
    }
  }
  out.value = sum * inv_n;
  return out;
}

LossResult dice_loss(const ProbMap& pred, const BinaryMask& target,
                     const RegionMask& region) {
  check_pred_target_region(pred, target, region, "dice_loss");
  LossResult out;
  out.gradients.emplace_back(1, pred.size(), 0.0);
  if (region.empty()) return out;

  const auto p = pred.values();
  const auto t = target.bits();
  const auto r = region.bits();
  double inter = 0.0;
  double sum_p = 0.0;
  double sum_t = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!r[i]) continue;
    inter += p[i] * t[i];
    sum_p += p[i];
    sum_t += t[i];
  }
  const double num = 2.0 * inter + kDiceSmoothing;
  const double den = sum_p + sum_t + kDiceSmoothing;
  out.value = 1.0 - num / den;

  // d/dp_i [1 - N/D] = -(2 t_i D - N) / D^2
  auto g = out.gradients[0].values();
  const double inv_d2 = 1.0 / (den * den);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!r[i]) continue;
    g[i] = -(2.0 * t[i] * den - num) * inv_d2;
  }
  return out;
}

LossResult ic_loss(const FeatureMap& f_r, const FeatureMap& f_p, const RegionMask& u) {
  require(f_r.same_shape(f_p), "ic_loss", "feature maps differ in shape");
  require(f_r.size() == u.size(), "ic_loss",
          "features " + to_string(f_r.size()) + " vs region " + to_string(u.size()));
  LossResult out;
  out.gradients.emplace_back(f_r.channels(), f_r.size(), 0.0);
  out.gradients.emplace_back(f_r.channels(), f_r.size(), 0.0);
  const std::size_t active = u.count();
  if (active == 0) return out;

  const std::size_t plane = f_r.size().pixels();
  const double scale = 1.0 / (static_cast<double>(active) * f_r.channels());
  const auto a = f_r.values();
  const auto b = f_p.values();
  const auto m = u.bits();
  auto ga = out.gradients[0].values();
  auto gb = out.gradients[1].values();
  double sum = 0.0;
  for (int c = 0; c < f_r.channels(); ++c) {
    const std::size_t base = static_cast<std::size_t>(c) * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      if (!m[i]) continue;
      const double d = a[base + i] - b[base + i];
      sum += d * d;
      ga[base + i] = 2.0 * d * scale;
      gb[base + i] = -2.0 * d * scale;
    }
  }
  out.value = sum * scale;
  return out;
}

TotalLossResult total_loss(const ProbMap& pred_r, const ProbMap& pred_p,
                           const FeatureMap& f_r, const FeatureMap& f_p,
                           const TriLabelMask& pseudo, TotalLossOptions options) {
  const ImageSize& size = pseudo.size();
  require(pred_r.size() == size && pred_p.size() == size, "total_loss",
          "prediction size does not match pseudo label " + to_string(size));
  require(f_r.size() == size && f_p.size() == size, "total_loss",
          "feature size does not match pseudo label " + to_string(size));

  const BinaryMask target = pseudo.region(Label::kForeground);
  const BinaryMask uncertain = pseudo.region(Label::kUncertain);
  const RegionMask certain = complement(uncertain);

  TotalLossResult out;
  LossResult bce_r = bce_loss(pred_r, target, certain);
  LossResult dice_r = dice_loss(pred_r, target, certain);
  LossResult bce_p = bce_loss(pred_p, target, certain);
  LossResult dice_p = dice_loss(pred_p, target, certain);
  out.terms.bce_r = bce_r.value;
  out.terms.dice_r = dice_r.value;
  out.terms.bce_p = bce_p.value;
  out.terms.dice_p = dice_p.value;

  out.grad_pred_r = std::move(bce_r.gradients[0]);
  out.grad_pred_p = std::move(bce_p.gradients[0]);
  {
    auto gr = out.grad_pred_r.values();
    auto gp = out.grad_pred_p.values();
    const auto dr = dice_r.gradients[0].values();
    const auto dp = dice_p.gradients[0].values();
    for (std::size_t i = 0; i < gr.size(); ++i) {
      gr[i] += dr[i];
      gp[i] += dp[i];
    }
  }

  if (options.consistency) {
    LossResult ic = ic_loss(f_r, f_p, uncertain);
    out.terms.ic = ic.value;
    out.grad_f_r = std::move(ic.gradients[0]);
    out.grad_f_p = std::move(ic.gradients[1]);
  } else {
    out.grad_f_r = FeatureMap(f_r.channels(), size, 0.0);
    out.grad_f_p = FeatureMap(f_p.channels(), size, 0.0);
  }
  out.value = out.terms.sum();
  return out;
}

}  // namespace boxboost
