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

#include <cmath>
#include <vector>

#include "boxboost/error.hpp"
#include "boxboost/losses.hpp"
#include "test_util.hpp"

namespace boxboost {
namespace {

using testing::random_mask;
using testing::random_prob;
using testing::relative_error;

constexpr double kFdStep = 1e-4;
constexpr double kFdTolerance = 1e-4;

ProbMap with_value(const ProbMap& p, std::size_t i, double v) {
  std::vector<double> values(p.values().begin(), p.values().end());
  values[i] = v;
  return ProbMap(p.size(), std::move(values));
}

// Textbook unmasked definitions over an explicit pixel list.
double oracle_bce(const std::vector<double>& p, const std::vector<int>& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = std::clamp(p[i], kBceEpsilon, 1.0 - kBceEpsilon);
    s += -(t[i] * std::log(q) + (1 - t[i]) * std::log(1.0 - q));
  }
  return p.empty() ? 0.0 : s / static_cast<double>(p.size());
}

double oracle_dice_loss(const std::vector<double>& p, const std::vector<int>& t) {
  double inter = 0.0, sp = 0.0, st = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    inter += p[i] * t[i];
    sp += p[i];
    st += t[i];
  }
  return 1.0 - (2.0 * inter + 1.0) / (sp + st + 1.0);
}

TEST(BceLoss, HalfEverywhereIsLn2) {
  Rng rng(1);
  const BinaryMask t = random_mask(rng, {4, 4}, 0.5);
  const LossResult r = bce_loss(ProbMap({4, 4}, 0.5), t, BinaryMask::filled({4, 4}, true));
  EXPECT_NEAR(r.value, std::log(2.0), 1e-12);
}

TEST(BceLoss, PerfectPredictionIsNearZero) {
  const BinaryMask t({2, 2}, {1, 0, 0, 1});
  const ProbMap p({2, 2}, {1.0, 0.0, 0.0, 1.0});
  const LossResult r = bce_loss(p, t, BinaryMask::filled({2, 2}, true));
  EXPECT_LE(r.value, -std::log(1.0 - kBceEpsilon) + 1e-15);
}

TEST(BceLoss, RegionSelectsPixels) {
  const ProbMap p({2, 2}, {0.2, 0.7, 0.9, 0.4});
  const BinaryMask t({2, 2}, {0, 1, 0, 1});
  const BinaryMask region({2, 2}, {0, 1, 1, 0});
  const double want = (-std::log(0.7) - std::log(1.0 - 0.9)) / 2.0;
  EXPECT_NEAR(bce_loss(p, t, region).value, want, 1e-12);
}

TEST(BceLoss, EmptyRegionIsZeroWithZeroGradient) {
  const LossResult r = bce_loss(ProbMap({3, 3}, 0.3), BinaryMask({3, 3}), BinaryMask({3, 3}));
  EXPECT_EQ(r.value, 0.0);
  for (double g : r.gradients[0].values()) EXPECT_EQ(g, 0.0);
}

TEST(DiceLoss, PerfectPredictionIsZero) {
  const BinaryMask t({2, 3}, {1, 1, 0, 0, 1, 0});
  std::vector<double> v(t.bits().begin(), t.bits().end());
  EXPECT_NEAR(dice_loss(ProbMap({2, 3}, v), t, BinaryMask::filled({2, 3}, true)).value, 0.0,
              1e-15);
}

TEST(DiceLoss, SmoothingHandlesEmptyTargets) {
  EXPECT_EQ(dice_loss(ProbMap({2, 2}, 0.0), BinaryMask({2, 2}), BinaryMask::filled({2, 2}, true))
                .value,
            0.0);
}

TEST(DiceLoss, HandExample) {
  const BinaryMask t({2, 2}, {1, 1, 0, 0});
  EXPECT_NEAR(dice_loss(ProbMap({2, 2}, 0.5), t, BinaryMask::filled({2, 2}, true)).value, 0.4,
              1e-15);
}

TEST(IcLoss, WorkedExampleIsTen) {
  const FeatureMap fr(1, {2, 2}, {1, 2, 3, 4});
  const FeatureMap fp(1, {2, 2}, {1, 0, 3, 0});
  const BinaryMask u({2, 2}, {0, 1, 0, 1});
  EXPECT_EQ(ic_loss(fr, fp, u).value, 10.0);
}

TEST(IcLoss, EmptyRegionIsZeroWithZeroGradients) {
  const FeatureMap fr(2, {2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
  const FeatureMap fp(2, {2, 2}, 0.0);
  const LossResult r = ic_loss(fr, fp, BinaryMask({2, 2}));
  EXPECT_EQ(r.value, 0.0);
  for (const FeatureMap& g : r.gradients) {
    for (double v : g.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(IcLoss, SymmetricWithOpposedGradients) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const ImageSize size{rng.uniform_int(1, 6), rng.uniform_int(1, 6)};
    const int c = rng.uniform_int(1, 3);
    std::vector<double> a(c * size.pixels()), b(a.size());
    for (double& v : a) v = rng.uniform(-3, 3);
    for (double& v : b) v = rng.uniform(-3, 3);
    const FeatureMap fr(c, size, a), fp(c, size, b);
    const BinaryMask u = random_mask(rng, size, 0.5);
    const LossResult x = ic_loss(fr, fp, u);
    const LossResult y = ic_loss(fp, fr, u);
    EXPECT_NEAR(x.value, y.value, 1e-12);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(x.gradients[0].values()[i], -x.gradients[1].values()[i], 1e-12);
      EXPECT_NEAR(x.gradients[0].values()[i], y.gradients[1].values()[i], 1e-12);
    }
  }
}

TEST(IcLoss, ZeroIffEqualOnRegion) {
  const FeatureMap fr(1, {1, 3}, {1, 5, 2});
  const FeatureMap fp(1, {1, 3}, {1, 9, 2});
  EXPECT_EQ(ic_loss(fr, fp, BinaryMask({1, 3}, {1, 0, 1})).value, 0.0);
  EXPECT_GT(ic_loss(fr, fp, BinaryMask({1, 3}, {1, 1, 1})).value, 0.0);
}

TEST(IcLoss, AveragesOverChannels) {
  const FeatureMap fr(2, {1, 1}, {2, 4});
  const FeatureMap fp(2, {1, 1}, {0, 0});
  EXPECT_EQ(ic_loss(fr, fp, BinaryMask::filled({1, 1}, true)).value, (4.0 + 16.0) / 2.0);
}

TEST(Losses, ShapeMismatchIsShapeError) {
  const BinaryMask m({2, 2});
  try {
    bce_loss(ProbMap({2, 3}, 0.5), m, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
  EXPECT_THROW(dice_loss(ProbMap({2, 2}, 0.5), BinaryMask({3, 2}), m), Error);
  EXPECT_THROW(ic_loss(FeatureMap(1, {2, 2}), FeatureMap(2, {2, 2}), m), Error);
  EXPECT_THROW(ic_loss(FeatureMap(1, {2, 2}), FeatureMap(1, {2, 2}), BinaryMask({2, 3})), Error);
}

TEST(Losses, FullRegionMatchesTextbookDefinitions) {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const ImageSize size{rng.uniform_int(1, 4), rng.uniform_int(1, 4)};
    const ProbMap p = random_prob(rng, size);
    const BinaryMask t = random_mask(rng, size, 0.5);
    std::vector<double> pv(p.values().begin(), p.values().end());
    std::vector<int> tv(t.bits().begin(), t.bits().end());
    const BinaryMask all = BinaryMask::filled(size, true);
    EXPECT_NEAR(bce_loss(p, t, all).value, oracle_bce(pv, tv), 1e-12);
    EXPECT_NEAR(dice_loss(p, t, all).value, oracle_dice_loss(pv, tv), 1e-12);
  }
}

TEST(Losses, MaskingLocality) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const ImageSize size{5, 5};
    const ProbMap p = random_prob(rng, size);
    const BinaryMask t = random_mask(rng, size, 0.5);
    const BinaryMask region = random_mask(rng, size, 0.5);
    std::vector<double> other(p.values().begin(), p.values().end());
    for (std::size_t i = 0; i < other.size(); ++i) {
      if (!region.bits()[i]) other[i] = rng.uniform01();
    }
    const ProbMap q(size, other);
    for (auto loss : {&bce_loss, &dice_loss}) {
      const LossResult a = loss(p, t, region);
      const LossResult b = loss(q, t, region);
      EXPECT_EQ(a.value, b.value);
      EXPECT_EQ(a.gradients[0], b.gradients[0]);
      for (std::size_t i = 0; i < other.size(); ++i) {
        if (!region.bits()[i]) {
          EXPECT_EQ(a.gradients[0].values()[i], 0.0);
        }
      }
    }
    const FeatureMap fr(1, size, std::vector<double>(p.values().begin(), p.values().end()));
    const FeatureMap fq(1, size, other);
    const FeatureMap f0(1, size, 0.25);
    EXPECT_EQ(ic_loss(fr, f0, region).value, ic_loss(fq, f0, region).value);
  }
}

TEST(Losses, NonNegative) {
  Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const ImageSize size{4, 4};
    const ProbMap p = random_prob(rng, size);
    const BinaryMask t = random_mask(rng, size, 0.5);
    const BinaryMask r = random_mask(rng, size, 0.7);
    EXPECT_GE(bce_loss(p, t, r).value, 0.0);
    EXPECT_GE(dice_loss(p, t, r).value, 0.0);
  }
}

// 100 random (input, coordinate) points per loss.
TEST(LossGradients, BceMatchesCentralDifferences) {
  Rng rng(100);
  for (int point = 0; point < 100; ++point) {
    const ImageSize size{rng.uniform_int(2, 6), rng.uniform_int(2, 6)};
    const ProbMap p = random_prob(rng, size, 0.05, 0.95);
    const BinaryMask t = random_mask(rng, size, 0.5);
    BinaryMask region = random_mask(rng, size, 0.6);
    const std::size_t i = rng.below(size.pixels());
    region.set(static_cast<int>(i) / size.width, static_cast<int>(i) % size.width, true);
    const double analytic = bce_loss(p, t, region).gradients[0].values()[i];
    const double x = p.values()[i];
    const double numeric = (bce_loss(with_value(p, i, x + kFdStep), t, region).value -
                            bce_loss(with_value(p, i, x - kFdStep), t, region).value) /
                           (2 * kFdStep);
    EXPECT_LT(relative_error(analytic, numeric), kFdTolerance) << "point " << point;
  }
}

TEST(LossGradients, DiceMatchesCentralDifferences) {
  Rng rng(101);
  for (int point = 0; point < 100; ++point) {
    const ImageSize size{rng.uniform_int(2, 6), rng.uniform_int(2, 6)};
    const ProbMap p = random_prob(rng, size, 0.05, 0.95);
    const BinaryMask t = random_mask(rng, size, 0.5);
    BinaryMask region = random_mask(rng, size, 0.6);
    const std::size_t i = rng.below(size.pixels());
    region.set(static_cast<int>(i) / size.width, static_cast<int>(i) % size.width, true);
    const double analytic = dice_loss(p, t, region).gradients[0].values()[i];
    const double x = p.values()[i];
    const double numeric = (dice_loss(with_value(p, i, x + kFdStep), t, region).value -
                            dice_loss(with_value(p, i, x - kFdStep), t, region).value) /
                           (2 * kFdStep);
    EXPECT_LT(relative_error(analytic, numeric), kFdTolerance) << "point " << point;
  }
}

TEST(LossGradients, IcMatchesCentralDifferencesForBothInputs) {
  Rng rng(102);
  for (int point = 0; point < 100; ++point) {
    const ImageSize size{rng.uniform_int(2, 5), rng.uniform_int(2, 5)};
    const int c = rng.uniform_int(1, 3);
    std::vector<double> a(c * size.pixels()), b(a.size());
    for (double& v : a) v = rng.uniform(-2, 2);
    for (double& v : b) v = rng.uniform(-2, 2);
    BinaryMask u = random_mask(rng, size, 0.5);
    const std::size_t i = rng.below(a.size());
    const std::size_t pixel = i % size.pixels();
    u.set(static_cast<int>(pixel) / size.width, static_cast<int>(pixel) % size.width, true);
    const int which = static_cast<int>(rng.below(2));
    FeatureMap fr(c, size, a), fp(c, size, b);
    const double analytic = ic_loss(fr, fp, u).gradients[which].values()[i];
    double& slot = (which == 0 ? fr : fp).values()[i];
    const double numeric =
        testing::central_difference([&] { return ic_loss(fr, fp, u).value; }, slot, kFdStep);
    EXPECT_LT(relative_error(analytic, numeric), kFdTolerance) << "point " << point;
  }
}

TEST(TotalLoss, EqualsSumOfIndependentTerms) {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const ImageSize size{5, 4};
    std::vector<Label> labels(size.pixels());
    for (Label& l : labels) l = static_cast<Label>(rng.below(3));
    const TriLabelMask pseudo(size, labels);
    const ProbMap pr = random_prob(rng, size), pp = random_prob(rng, size);
    const FeatureMap fr = FeatureMap::from_prob(random_prob(rng, size));
    const FeatureMap fp = FeatureMap::from_prob(random_prob(rng, size));
    const BinaryMask fg = pseudo.region(Label::kForeground);
    const BinaryMask un = pseudo.region(Label::kUncertain);
    const BinaryMask certain = complement(un);
    const double want = bce_loss(pr, fg, certain).value + dice_loss(pr, fg, certain).value +
                        bce_loss(pp, fg, certain).value + dice_loss(pp, fg, certain).value +
                        ic_loss(fr, fp, un).value;
    const TotalLossResult got = total_loss(pr, pp, fr, fp, pseudo);
    EXPECT_NEAR(got.value, want, 1e-12);
    EXPECT_NEAR(got.terms.sum(), got.value, 1e-12);

    const TotalLossResult off = total_loss(pr, pp, fr, fp, pseudo, {.consistency = false});
    EXPECT_EQ(off.terms.ic, 0.0);
    EXPECT_NEAR(off.value, want - ic_loss(fr, fp, un).value, 1e-12);
  }
}

TEST(TotalLoss, PerfectCertainPredictionsGiveZero) {
  const BinaryMask gt({3, 3}, {0, 1, 0, 1, 1, 1, 0, 1, 0});
  std::vector<double> v(gt.bits().begin(), gt.bits().end());
  const ProbMap p({3, 3}, v);
  const FeatureMap f = FeatureMap::from_prob(p);
  EXPECT_NEAR(total_loss(p, p, f, f, TriLabelMask::from_binary(gt)).value, 0.0, 1e-6);
}

TEST(TotalLoss, AllUncertainLeavesOnlyConsistency) {
  const ImageSize size{2, 2};
  const TriLabelMask pseudo(size, Label::kUncertain);
  const FeatureMap fr(1, size, {1, 2, 3, 4});
  const FeatureMap fp(1, size, 0.0);
  const TotalLossResult r =
      total_loss(ProbMap(size, 0.3), ProbMap(size, 0.8), fr, fp, pseudo);
  EXPECT_EQ(r.terms.bce_r + r.terms.dice_r + r.terms.bce_p + r.terms.dice_p, 0.0);
  EXPECT_EQ(r.value, (1.0 + 4.0 + 9.0 + 16.0) / 4.0);
}

TEST(TotalLoss, ShapeMismatchIsShapeError) {
  const TriLabelMask pseudo({2, 2}, Label::kBackground);
  EXPECT_THROW(total_loss(ProbMap({2, 3}, 0.5), ProbMap({2, 2}, 0.5), FeatureMap(1, {2, 2}),
                          FeatureMap(1, {2, 2}), pseudo),
               Error);
}

}  // namespace
}  // namespace boxboost
