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

#include "boxboost/ffs.hpp"

#include "boxboost/error.hpp"
#include "boxboost/parallel.hpp"

namespace boxboost {

void FfsConfig::validate() const {
  if (!(dice_threshold >= 0.0 && dice_threshold <= 1.0)) {
    throw Error(ErrorKind::kParameter,
                "dice_threshold must lie in [0,1], got " + std::to_string(dice_threshold));
  }
  if (!(binarize_threshold >= 0.0 && binarize_threshold <= 1.0)) {
    throw Error(ErrorKind::kParameter, "binarize_threshold must lie in [0,1], got " +
                                           std::to_string(binarize_threshold));
  }
}

const char* to_string(FilterReason reason) {
  switch (reason) {
    case FilterReason::kKept: return "KEPT";
    case FilterReason::kLowDice: return "LOW_DICE";
    case FilterReason::kEmptyAnnotation: return "EMPTY_ANNOTATION";
  }
  return "UNKNOWN";
}

FilterDecision object_filter(const BinaryMask& b, const BinaryMask& p,
                             const FfsConfig& cfg) {
  cfg.validate();
  FilterDecision decision;
  decision.dice_score = dice(b, p);
  if (b.empty()) {
    decision.kept = false;
    decision.reason = FilterReason::kEmptyAnnotation;
  } else if (decision.dice_score > cfg.dice_threshold) {
    decision.kept = true;
    decision.reason = FilterReason::kKept;
  } else {
    decision.kept = false;
    decision.reason = FilterReason::kLowDice;
  }
  return decision;
}

TriLabelMask pixel_fusion(const BinaryMask& b, const BinaryMask& p) {
  if (b.size() != p.size()) {
    throw Error(ErrorKind::kShape, "pixel_fusion: size mismatch " + to_string(b.size()) +
                                       " vs " + to_string(p.size()));
  }
  const auto bb = b.bits();
  const auto pb = p.bits();
  std::vector<Label> labels(bb.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (bb[i] && pb[i]) {
      labels[i] = Label::kForeground;
    } else if (!bb[i] && !pb[i]) {
      labels[i] = Label::kBackground;
    } else {
      labels[i] = Label::kUncertain;
    }
  }
  return TriLabelMask(b.size(), std::move(labels));
}

std::vector<FfsItemResult> ffs_corpus(
    std::span<const std::pair<BinaryMask, ProbMap>> pairs, const FfsConfig& cfg,
    unsigned workers) {
  cfg.validate();
  std::vector<FfsItemResult> results(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t i) {
    FfsItemResult& out = results[i];
    out.index = i;
    try {
      const auto& [box_mask, prob] = pairs[i];
      const BinaryMask predicted = binarize(prob, cfg.binarize_threshold);
      out.decision = object_filter(box_mask, predicted, cfg);
      if (out.decision->kept) out.pseudo = pixel_fusion(box_mask, predicted);
    } catch (const std::exception& e) {
      out.decision.reset();
      out.pseudo.reset();
      out.error = "item " + std::to_string(i) + ": " + e.what();
    }
  });
  return results;
}

}  // namespace boxboost
