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


#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "boxboost/augment.hpp"
#include "test_util.hpp"

namespace boxboost {
namespace {

TriLabelMask random_labels(Rng& rng, ImageSize size) {
  std::vector<Label> labels(size.pixels());
  for (Label& l : labels) l = static_cast<Label>(rng.below(3));
  return TriLabelMask(size, labels);
}

Tensor<float> random_image(Rng& rng, ImageSize size) {
  Tensor<float> t({1, size.height, size.width});
  for (float& v : t.data) v = static_cast<float>(rng.uniform(-2, 2));
  return t;
}

TEST(Augment, FlipIsAnInvolution) {
  Rng rng(1);
  const TriLabelMask m = random_labels(rng, {8, 12});
  const Tensor<float> img = random_image(rng, {8, 12});
  for (Transform t : {Transform{.flip_h = true}, Transform{.flip_v = true}}) {
    EXPECT_EQ(apply_to_labels(t, apply_to_labels(t, m, 4), 4), m);
    EXPECT_EQ(apply_to_image(t, apply_to_image(t, img, 4), 4), img);
  }
}

TEST(Augment, FourQuarterTurnsAreIdentity) {
  Rng rng(2);
  const TriLabelMask m = random_labels(rng, {8, 12});
  const Transform quarter{.quarter_turns = 1};
  TriLabelMask r = m;
  for (int i = 0; i < 4; ++i) r = apply_to_labels(quarter, r, 4);
  EXPECT_EQ(r, m);
  EXPECT_EQ(apply_to_labels(quarter, m, 4).size(), (ImageSize{12, 8}));
}

TEST(Augment, QuarterTurnIsCounterClockwise) {
  BinaryMask m({4, 4});
  m.set(0, 3, true);  // top-right corner
  const BinaryMask r = apply_to_mask(Transform{.quarter_turns = 1}, m, 4);
  EXPECT_TRUE(r.at(0, 0));
}

TEST(Augment, ScaledSizesRoundToMultiple) {
  for (double s : kAugmentScales) {
    const ImageSize out = transformed_size(Transform{.scale = s}, {64, 64}, 4);
    EXPECT_EQ(out.height % 4, 0);
    EXPECT_EQ(out.height, static_cast<int>(64 * s));
  }
  EXPECT_EQ(transformed_size(Transform{.scale = 0.75}, {4, 4}, 4), (ImageSize{4, 4}));
}

TEST(Augment, LabelSetIsPreserved) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const ImageSize size{4 * rng.uniform_int(2, 6), 4 * rng.uniform_int(2, 6)};
    const TriLabelMask m = random_labels(rng, size);
    const auto [img, out] = augment(random_image(rng, size), m, rng.next(), 4);
    EXPECT_EQ(img.height(), out.size().height);
    EXPECT_EQ(img.width(), out.size().width);
    for (Label l : out.labels()) {
      EXPECT_TRUE(l == Label::kForeground || l == Label::kBackground || l == Label::kUncertain);
    }
  }
}

TEST(Augment, UncertainStaysUncertainWithoutRescaling) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const TriLabelMask m = random_labels(rng, {8, 8});
    const Transform t{.flip_h = rng.bernoulli(0.5), .flip_v = rng.bernoulli(0.5),
                      .quarter_turns = static_cast<int>(rng.below(4))};
    const TriLabelMask out = apply_to_labels(t, m, 4);
    EXPECT_EQ(out.count(Label::kUncertain), m.count(Label::kUncertain));
    EXPECT_EQ(out.count(Label::kForeground), m.count(Label::kForeground));
  }
}

TEST(Augment, NearestNeighbourCopiesInputLabels) {
  // Every output label of a rescale comes from some input pixel.
  const TriLabelMask m({8, 8}, Label::kUncertain);
  for (double s : kAugmentScales) {
    const TriLabelMask out = apply_to_labels(Transform{.scale = s}, m, 4);
    EXPECT_EQ(out.count(Label::kUncertain), out.size().pixels());
  }
}

TEST(Augment, ImageAndLabelsShareTheTransform) {
  // A label map that mirrors the image sign must stay aligned after augment.
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const ImageSize size{16, 16};
    Tensor<float> img({1, 16, 16});
    std::vector<Label> labels(size.pixels());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const bool fg = rng.bernoulli(0.5);
      img.data[i] = fg ? 1.0f : -1.0f;
      labels[i] = fg ? Label::kForeground : Label::kBackground;
    }
    const std::uint64_t seed = rng.next();
    const Transform t = sample_transform(seed);
    if (t.scale != 1.0) continue;
    const auto [a, m] = augment(img, TriLabelMask(size, labels), seed, 4);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      EXPECT_EQ(a.data[i] > 0.0f, m.labels()[i] == Label::kForeground);
    }
  }
}

TEST(Augment, SamplingIsDeterministicAndCoversAllModes) {
  std::set<int> turns;
  std::set<double> scales;
  for (std::uint64_t s = 0; s < 200; ++s) {
    EXPECT_EQ(sample_transform(s), sample_transform(s));
    turns.insert(sample_transform(s).quarter_turns);
    scales.insert(sample_transform(s).scale);
  }
  EXPECT_EQ(turns.size(), 4u);
  EXPECT_EQ(scales.size(), 3u);
}

}  // namespace
}  // namespace boxboost
