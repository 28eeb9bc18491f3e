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

// Synthetic two-regime corpus: a small mask-annotated training split, a
// larger box-annotated split with injected annotation noise, and a test split.
//
// Frames show 1-3 perturbed elliptical blobs on a textured background with
// bright fold-like distractors. Blob outlines follow
//   rho(phi) <= 1 + a * sin(k * phi + psi)
// in the blob's own elliptical coordinates, so a tight box always covers
// background pixels too.

#ifndef BOXBOOST_SYNTH_HPP_
#define BOXBOOST_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "boxboost/image_io.hpp"
#include "boxboost/manifest.hpp"
#include "boxboost/mask.hpp"

namespace boxboost {

struct NoiseFractions {
  double blur = 0.0;
  double no_polyp = 0.0;
  double wrong_label = 0.0;
  double imprecise_box = 0.0;

  double clean() const { return 1.0 - blur - no_polyp - wrong_label - imprecise_box; }
  /// Each fraction in [0,1] and their sum <= 1 (kParameter otherwise).
  void validate() const;
};

struct CorpusSpec {
  ImageSize size{64, 64};
  int train_mask = 60;
  int train_box = 400;
  int test = 100;
  NoiseFractions noise;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Exact per-mode record counts for the box split; CLEAN takes the remainder.
struct NoiseCounts {
  int clean = 0;
  int blur = 0;
  int no_polyp = 0;
  int wrong_label = 0;
  int imprecise_box = 0;
};
NoiseCounts noise_counts(const NoiseFractions& f, int n);

struct SyntheticSample {
  ManifestRecord record;
  GrayImage image;
  BinaryMask ground_truth;
  /// Tight boxes of the visible blobs (what a perfect annotator would draw).
  std::vector<Box> true_boxes;
};

struct SyntheticCorpus {
  CorpusSpec spec;
  std::vector<SyntheticSample> samples;
};

/// Deterministic in `spec.seed`.
SyntheticCorpus synthesize(const CorpusSpec& spec);

/// Writes manifest.jsonl plus images/, masks/ and gt/ under `dir`.
CorpusManifest write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

inline CorpusManifest generate_corpus(const CorpusSpec& spec, const std::filesystem::path& dir) {
  return write_corpus(synthesize(spec), dir);
}

/// Separable Gaussian blur with clamped borders.
GrayImage gaussian_blur(const GrayImage& image, double sigma);

}  // namespace boxboost

#endif  // BOXBOOST_SYNTH_HPP_
