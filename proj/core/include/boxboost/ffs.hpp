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

// Fusion filter sampling: turns a box mask B and a baseline prediction P into
// a tri-valued pseudo label, after rejecting frames where B and P disagree.
//
//   object level:  keep the frame iff dice(B, P) > dice_threshold
//   pixel level:   FG = B n P,  BG = ~B n ~P,  everything else UNCERTAIN

#ifndef BOXBOOST_FFS_HPP_
#define BOXBOOST_FFS_HPP_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boxboost/mask.hpp"

namespace boxboost {

struct FfsConfig {
  double dice_threshold = 0.7;
  double binarize_threshold = 0.5;

  /// Throws kParameter if either threshold lies outside [0, 1].
  void validate() const;
};

enum class FilterReason { kKept, kLowDice, kEmptyAnnotation };

const char* to_string(FilterReason reason);

struct FilterDecision {
  double dice_score = 0.0;
  bool kept = false;
  FilterReason reason = FilterReason::kLowDice;
};

/// Object-level filter. An all-zero box mask is always rejected with
/// kEmptyAnnotation; otherwise kept iff dice(b, p) > cfg.dice_threshold.
FilterDecision object_filter(const BinaryMask& b, const BinaryMask& p,
                             const FfsConfig& cfg = {});

TriLabelMask pixel_fusion(const BinaryMask& b, const BinaryMask& p);

struct FfsItemResult {
  std::size_t index = 0;
  std::optional<FilterDecision> decision;
  std::optional<TriLabelMask> pseudo;  // present only for kept items
  std::optional<std::string> error;    // set when this item failed

  bool ok() const { return !error.has_value(); }
};

/// Runs binarize -> object_filter -> pixel_fusion over a batch. Results come
/// back in input order. A failing item records its error and the batch
/// continues.
std::vector<FfsItemResult> ffs_corpus(
    std::span<const std::pair<BinaryMask, ProbMap>> pairs, const FfsConfig& cfg,
    unsigned workers = 1);

}  // namespace boxboost

#endif  // BOXBOOST_FFS_HPP_
