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

#include <utility>
#include <vector>

#include "boxboost/error.hpp"
#include "boxboost/ffs.hpp"
#include "test_util.hpp"

namespace boxboost {
namespace {

using testing::oracle_dice;
using testing::random_mask;
using testing::random_size;

// Mask of n set pixels starting at flat index start in a 20x20 grid.
BinaryMask run_of(int start, int n) {
  BinaryMask m({20, 20});
  for (int i = start; i < start + n; ++i) m.set(i / 20, i % 20, true);
  return m;
}

TEST(ObjectFilter, IdenticalMasksAreKept) {
  const BinaryMask b = run_of(0, 30);
  const FilterDecision d = object_filter(b, b);
  EXPECT_EQ(d.dice_score, 1.0);
  EXPECT_TRUE(d.kept);
  EXPECT_EQ(d.reason, FilterReason::kKept);
}

TEST(ObjectFilter, ExactThresholdIsRejected) {
  // |b| = |p| = 100 with 70 shared pixels.
  const BinaryMask b = run_of(0, 100);
  const BinaryMask p = run_of(30, 100);
  const FilterDecision d = object_filter(b, p);
  EXPECT_EQ(d.dice_score, 0.7);
  EXPECT_FALSE(d.kept);
  EXPECT_EQ(d.reason, FilterReason::kLowDice);
}

TEST(ObjectFilter, JustAboveThresholdIsKept) {
  const BinaryMask b = run_of(0, 100);
  const BinaryMask p = run_of(30, 100);
  FfsConfig cfg;
  cfg.dice_threshold = 0.7 - 1e-9;
  EXPECT_TRUE(object_filter(b, p, cfg).kept);
}

TEST(ObjectFilter, DisjointIsLowDice) {
  const FilterDecision d = object_filter(run_of(0, 10), run_of(50, 10));
  EXPECT_EQ(d.dice_score, 0.0);
  EXPECT_EQ(d.reason, FilterReason::kLowDice);
}

TEST(ObjectFilter, EmptyAnnotationRejectedRegardlessOfPrediction) {
  const BinaryMask empty({20, 20});
  for (const BinaryMask& p : {empty, run_of(0, 40)}) {
    const FilterDecision d = object_filter(empty, p);
    EXPECT_FALSE(d.kept);
    EXPECT_EQ(d.reason, FilterReason::kEmptyAnnotation);
  }
}

TEST(ObjectFilter, SizeMismatchIsShapeError) {
  try {
    object_filter(BinaryMask({2, 2}), BinaryMask({2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(ObjectFilter, SymmetricAndMonotone) {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const ImageSize size = random_size(rng, 12);
    BinaryMask b = random_mask(rng, size, rng.uniform01());
    BinaryMask p = random_mask(rng, size, rng.uniform01());
    if (b.empty() || p.empty()) continue;
    FfsConfig cfg;
    cfg.dice_threshold = rng.uniform01();
    const FilterDecision bp = object_filter(b, p, cfg);
    const FilterDecision pb = object_filter(p, b, cfg);
    EXPECT_EQ(bp.dice_score, pb.dice_score);
    EXPECT_EQ(bp.kept, pb.kept);
    EXPECT_NEAR(bp.dice_score, oracle_dice(b, p), 1e-12);

    // Move one p-only pixel onto a b-only pixel: |p| fixed, overlap grows.
    int from = -1, to = -1;
    for (int i = 0; i < static_cast<int>(size.pixels()); ++i) {
      const int y = i / size.width, x = i % size.width;
      if (p.at(y, x) && !b.at(y, x) && from < 0) from = i;
      if (b.at(y, x) && !p.at(y, x) && to < 0) to = i;
    }
    if (from < 0 || to < 0) continue;
    p.set(from / size.width, from % size.width, false);
    p.set(to / size.width, to % size.width, true);
    const FilterDecision grown = object_filter(b, p, cfg);
    EXPECT_GT(grown.dice_score, bp.dice_score);
    if (bp.kept) {
      EXPECT_TRUE(grown.kept);
    }
  }
}

TEST(PixelFusion, AgreementLeavesNoUncertainty) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const BinaryMask b = random_mask(rng, random_size(rng, 10), 0.5);
    const TriLabelMask t = pixel_fusion(b, b);
    EXPECT_EQ(t.count(Label::kUncertain), 0u);
    EXPECT_EQ(t.region(Label::kForeground), b);
  }
}

TEST(PixelFusion, TotalDisagreementIsAllUncertain) {
  const TriLabelMask t =
      pixel_fusion(BinaryMask::filled({3, 5}, true), BinaryMask::filled({3, 5}, false));
  EXPECT_EQ(t.count(Label::kUncertain), 15u);
}

TEST(PixelFusion, QuadrantExample) {
  const std::vector<Box> left{{0, 0, 2, 4}};
  const std::vector<Box> top{{0, 0, 4, 2}};
  const TriLabelMask t =
      pixel_fusion(rasterize_boxes(left, {4, 4}), rasterize_boxes(top, {4, 4}));
  EXPECT_EQ(t.count(Label::kForeground), 4u);
  EXPECT_EQ(t.count(Label::kBackground), 4u);
  EXPECT_EQ(t.count(Label::kUncertain), 8u);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      const Label want = (y < 2 && x < 2)     ? Label::kForeground
                         : (y >= 2 && x >= 2) ? Label::kBackground
                                              : Label::kUncertain;
      EXPECT_EQ(t.at(y, x), want) << y << "," << x;
    }
  }
}

TEST(PixelFusion, SizeMismatchIsShapeError) {
  EXPECT_THROW(pixel_fusion(BinaryMask({2, 2}), BinaryMask({3, 2})), Error);
}

TEST(FfsCorpus, IdenticalPairsAreAllKept) {
  Rng rng(8);
  std::vector<std::pair<BinaryMask, ProbMap>> pairs;
  for (int i = 0; i < 20; ++i) {
    BinaryMask b = random_mask(rng, {8, 8}, 0.3);
    b.set(0, 0, true);
    std::vector<double> v(b.bits().begin(), b.bits().end());
    pairs.emplace_back(b, ProbMap({8, 8}, v));
  }
  const auto out = ffs_corpus(pairs, FfsConfig{}, 3);
  ASSERT_EQ(out.size(), pairs.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].index, i);
    ASSERT_TRUE(out[i].pseudo.has_value());
    EXPECT_EQ(out[i].pseudo->region(Label::kForeground), pairs[i].first);
    EXPECT_EQ(out[i].pseudo->count(Label::kUncertain), 0u);
  }
}

TEST(FfsCorpus, EmptyCorpus) { EXPECT_TRUE(ffs_corpus({}, FfsConfig{}).empty()); }

TEST(FfsCorpus, BadItemDoesNotAbortBatch) {
  std::vector<std::pair<BinaryMask, ProbMap>> pairs;
  pairs.emplace_back(BinaryMask::filled({4, 4}, true), ProbMap({4, 4}, 0.9));
  pairs.emplace_back(BinaryMask::filled({4, 4}, true), ProbMap({4, 5}, 0.9));
  pairs.emplace_back(BinaryMask::filled({4, 4}, true), ProbMap({4, 4}, 0.1));
  const auto out = ffs_corpus(pairs, FfsConfig{}, 2);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_TRUE(out[0].ok() && out[0].pseudo.has_value());
  EXPECT_FALSE(out[1].ok());
  EXPECT_NE(out[1].error->find("1"), std::string::npos);
  EXPECT_TRUE(out[2].ok());
  EXPECT_FALSE(out[2].pseudo.has_value());
  EXPECT_EQ(out[2].decision->reason, FilterReason::kLowDice);
}

TEST(FfsCorpus, RejectedItemsCarryNoPseudoLabel) {
  Rng rng(12);
  std::vector<std::pair<BinaryMask, ProbMap>> pairs;
  for (int i = 0; i < 100; ++i) {
    const ImageSize size{8, 8};
    pairs.emplace_back(random_mask(rng, size, 0.4), testing::random_prob(rng, size));
  }
  for (const auto& r : ffs_corpus(pairs, FfsConfig{}, 1)) {
    ASSERT_TRUE(r.decision.has_value());
    EXPECT_EQ(r.pseudo.has_value(), r.decision->kept);
    if (r.decision->kept) {
      EXPECT_GT(r.decision->dice_score, 0.7);
    }
  }
}

TEST(FfsConfig, RejectsThresholdsOutsideUnitInterval) {
  FfsConfig cfg;
  cfg.dice_threshold = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.binarize_threshold = -0.5;
  EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace boxboost
