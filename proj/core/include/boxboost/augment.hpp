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

#ifndef BOXBOOST_AUGMENT_HPP_
#define BOXBOOST_AUGMENT_HPP_

#include <array>
#include <cstdint>
#include <utility>

#include "boxboost/mask.hpp"
#include "boxboost/tensor.hpp"

namespace boxboost {

inline constexpr std::array<double, 3> kAugmentScales = {0.75, 1.0, 1.25};

/// Geometric transform applied identically to an image and its labels.
/// Order: flips, then counter-clockwise quarter turns, then rescaling.
struct Transform {
  bool flip_h = false;
  bool flip_v = false;
  int quarter_turns = 0;  // 0..3
  double scale = 1.0;

  bool operator==(const Transform&) const = default;
};

Transform sample_transform(std::uint64_t seed);

/// Output size after `t`; rescaled sides are rounded to a multiple of
/// `size_multiple` (at least one multiple).
ImageSize transformed_size(const Transform& t, ImageSize size, int size_multiple);

/// Image channels are resampled bilinearly; labels use nearest neighbour so
/// every output label is copied from some input pixel.
Tensor<float> apply_to_image(const Transform& t, const Tensor<float>& image, int size_multiple);
TriLabelMask apply_to_labels(const Transform& t, const TriLabelMask& labels, int size_multiple);
BinaryMask apply_to_mask(const Transform& t, const BinaryMask& mask, int size_multiple);

/// Samples one transform from `seed` and applies it to both inputs.
std::pair<Tensor<float>, TriLabelMask> augment(const Tensor<float>& image,
                                               const TriLabelMask& labels, std::uint64_t seed,
                                               int size_multiple = 4);

}  // namespace boxboost

#endif  // BOXBOOST_AUGMENT_HPP_
