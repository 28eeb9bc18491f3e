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


#include <benchmark/benchmark.h>

#include <vector>

#include "boxboost/ffs.hpp"
#include "boxboost/losses.hpp"
#include "boxboost/mask.hpp"
#include "boxboost/network.hpp"
#include "boxboost/random.hpp"

namespace boxboost {
namespace {

BinaryMask noise_mask(Rng& rng, ImageSize size, double density) {
  BinaryMask m(size);
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) m.set(y, x, rng.bernoulli(density));
  }
  return m;
}

ProbMap noise_prob(Rng& rng, ImageSize size) {
  std::vector<double> v(size.pixels());
  for (double& x : v) x = rng.uniform01();
  return ProbMap(size, std::move(v));
}

Tensor<float> noise_image(Rng& rng, int side) {
  Tensor<float> t({1, side, side});
  for (float& v : t.data) v = static_cast<float>(rng.uniform(-2.0, 2.0));
  return t;
}

NetworkConfig config_for(int arch) {
  return arch == 0 ? NetworkConfig::arch_a(1) : NetworkConfig::arch_b(1);
}

void BM_Forward(benchmark::State& state) {
  Rng rng(1);
  const Network<float> net(config_for(static_cast<int>(state.range(0))));
  const Tensor<float> x = noise_image(rng, static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_Forward)->ArgsProduct({{0, 1}, {32, 64}})->Unit(benchmark::kMicrosecond);

void BM_ForwardBackward(benchmark::State& state) {
  Rng rng(2);
  const Network<float> net(config_for(static_cast<int>(state.range(0))));
  const int side = static_cast<int>(state.range(1));
  const Tensor<float> x = noise_image(rng, side);
  Tensor<float> upstream({1, side, side});
  for (float& v : upstream.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  for (auto _ : state) {
    const auto out = net.forward(x);
    benchmark::DoNotOptimize(net.backward(out.cache, upstream));
  }
}
BENCHMARK(BM_ForwardBackward)->ArgsProduct({{0, 1}, {32, 64}})->Unit(benchmark::kMicrosecond);

void BM_Dice(benchmark::State& state) {
  Rng rng(3);
  const int side = static_cast<int>(state.range(0));
  const BinaryMask a = noise_mask(rng, {side, side}, 0.3);
  const BinaryMask b = noise_mask(rng, {side, side}, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(dice(a, b));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Dice)->Arg(64)->Arg(352);

void BM_PixelFusion(benchmark::State& state) {
  Rng rng(4);
  const int side = static_cast<int>(state.range(0));
  const BinaryMask b = noise_mask(rng, {side, side}, 0.4);
  const BinaryMask p = noise_mask(rng, {side, side}, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(pixel_fusion(b, p));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_PixelFusion)->Arg(64)->Arg(352);

void BM_FfsCorpus(benchmark::State& state) {
  Rng rng(5);
  std::vector<std::pair<BinaryMask, ProbMap>> items;
  for (int i = 0; i < state.range(0); ++i) {
    items.emplace_back(noise_mask(rng, {64, 64}, 0.4), noise_prob(rng, {64, 64}));
  }
  for (auto _ : state) benchmark::DoNotOptimize(ffs_corpus(items, FfsConfig{}, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FfsCorpus)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_IcLoss(benchmark::State& state) {
  Rng rng(6);
  const ImageSize size{64, 64};
  std::vector<double> a(size.pixels()), b(size.pixels());
  for (double& v : a) v = rng.uniform(-3, 3);
  for (double& v : b) v = rng.uniform(-3, 3);
  const FeatureMap fr(1, size, a), fp(1, size, b);
  const BinaryMask u = noise_mask(rng, size, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(ic_loss(fr, fp, u));
}
BENCHMARK(BM_IcLoss);

}  // namespace
}  // namespace boxboost

BENCHMARK_MAIN();
