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

#include "boxboost/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "boxboost/error.hpp"
#include "boxboost/random.hpp"

namespace boxboost {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Blob {
  double cy = 0, cx = 0;
  double a = 0, b = 0;  // semi-axes
  double theta = 0;
  double wobble = 0;
  int lobes = 3;
  double phase = 0;
  double contrast = 0;

  // Elliptical radius relative to the wobbly outline; <= 1 means inside.
  double relative_radius(double y, double x) const {
    const double dy = y - cy, dx = x - cx;
    const double c = std::cos(theta), s = std::sin(theta);
    const double u = (dx * c + dy * s) / a;
    const double v = (-dx * s + dy * c) / b;
    const double rho = std::sqrt(u * u + v * v);
    const double phi = std::atan2(v, u);
    return rho / (1.0 + wobble * std::sin(lobes * phi + phase));
  }

  double extent() const { return std::max(a, b) * (1.0 + wobble); }
};

struct Frame {
  GrayImage image;
  BinaryMask mask;
  std::vector<Box> boxes;  // one tight box per blob
};

Blob sample_blob(Rng& rng, ImageSize size) {
  Blob blob;
  blob.a = rng.uniform(5.0, 11.0);
  blob.b = blob.a * rng.uniform(0.7, 1.0);
  blob.theta = rng.uniform(0.0, kPi);
  blob.wobble = rng.uniform(0.0, 0.12);
  blob.lobes = rng.uniform_int(3, 5);
  blob.phase = rng.uniform(0.0, 2 * kPi);
  blob.contrast = rng.uniform(16.0, 40.0);
  const double r = blob.extent() + 1.0;
  blob.cy = rng.uniform(r, size.height - 1 - r);
  blob.cx = rng.uniform(r, size.width - 1 - r);
  return blob;
}

std::vector<Blob> place_blobs(Rng& rng, ImageSize size) {
  const double u = rng.uniform01();
  const int wanted = u < 0.5 ? 1 : (u < 0.85 ? 2 : 3);
  std::vector<Blob> blobs;
  for (int attempt = 0; attempt < 200 && static_cast<int>(blobs.size()) < wanted; ++attempt) {
    Blob candidate = sample_blob(rng, size);
    bool clear = true;
    for (const Blob& other : blobs) {
      const double d = std::hypot(candidate.cy - other.cy, candidate.cx - other.cx);
      if (d < candidate.extent() + other.extent() + 3.0) clear = false;
    }
    if (clear) blobs.push_back(candidate);
  }
  return blobs;
}

// Background texture, fold-like bright ridges and specular dots.
std::vector<double> render_background(Rng& rng, ImageSize size) {
  std::vector<double> img(size.pixels());
  const double base = rng.uniform(75.0, 110.0);
  struct Grating {
    double amp, fy, fx, phase;
  };
  std::vector<Grating> gratings;
  for (int i = 0; i < 3; ++i) {
    const double period = rng.uniform(10.0, 40.0);
    const double angle = rng.uniform(0.0, kPi);
    gratings.push_back({rng.uniform(3.0, 10.0), std::sin(angle) * 2 * kPi / period,
                        std::cos(angle) * 2 * kPi / period, rng.uniform(0.0, 2 * kPi)});
  }
  struct Fold {
    double y0, amp, freq, phase, width, gain;
    bool vertical;
  };
  std::vector<Fold> folds;
  const int n_folds = rng.uniform_int(0, 2);
  for (int i = 0; i < n_folds; ++i) {
    const bool vertical = rng.bernoulli(0.5);
    const int extent = vertical ? size.width : size.height;
    folds.push_back({rng.uniform(0.0, extent), rng.uniform(2.0, 8.0),
                     rng.uniform(0.05, 0.2), rng.uniform(0.0, 2 * kPi), rng.uniform(1.0, 2.5),
                     rng.uniform(15.0, 35.0), vertical});
  }
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      double v = base;
      for (const auto& g : gratings) v += g.amp * std::sin(g.fy * y + g.fx * x + g.phase);
      for (const auto& f : folds) {
        const double along = f.vertical ? y : x;
        const double across = f.vertical ? x : y;
        const double center = f.y0 + f.amp * std::sin(f.freq * along + f.phase);
        const double d = (across - center) / f.width;
        v += f.gain * std::exp(-0.5 * d * d);
      }
      img[static_cast<std::size_t>(y) * size.width + x] = v;
    }
  }
  const int n_spots = rng.uniform_int(0, 3);
  for (int i = 0; i < n_spots; ++i) {
    const double sy = rng.uniform(0.0, size.height), sx = rng.uniform(0.0, size.width);
    const double radius = rng.uniform(0.8, 1.8);
    const double gain = rng.uniform(40.0, 80.0);
    for (int y = 0; y < size.height; ++y) {
      for (int x = 0; x < size.width; ++x) {
        const double d = std::hypot(y - sy, x - sx) / radius;
        img[static_cast<std::size_t>(y) * size.width + x] += gain * std::exp(-0.5 * d * d);
      }
    }
  }
  return img;
}

Frame render_frame(Rng& rng, ImageSize size, bool with_polyps) {
  std::vector<double> img = render_background(rng, size);
  Frame frame;
  frame.mask = BinaryMask(size);
  const std::vector<Blob> blobs = with_polyps ? place_blobs(rng, size) : std::vector<Blob>{};
  for (const Blob& blob : blobs) {
    BinaryMask own(size);
    for (int y = 0; y < size.height; ++y) {
      for (int x = 0; x < size.width; ++x) {
        const double r = blob.relative_radius(y, x);
        // Soft edge in the image, hard edge in the mask.
        const double alpha = std::clamp((1.0 - r) / 0.15 + 0.5, 0.0, 1.0);
        if (alpha > 0.0) {
          const double shade = 0.65 + 0.35 * std::max(0.0, 1.0 - r * r);
          img[static_cast<std::size_t>(y) * size.width + x] += alpha * blob.contrast * shade;
        }
        if (r <= 1.0) own.set(y, x, true);
      }
    }
    if (own.empty()) continue;
    frame.boxes.push_back(bounding_box(own));
    frame.mask = unite(frame.mask, own);
  }
  const double sigma = rng.uniform(4.0, 9.0);
  frame.image.size = size;
  frame.image.pixels.resize(size.pixels());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = img[i] + sigma * rng.normal();
    frame.image.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return frame;
}

Box jitter_box(Rng& rng, const Box& box, ImageSize size) {
  auto shift = [&](int side) {
    const double magnitude = rng.uniform(0.1, 0.4) * side;
    return static_cast<int>(std::lround(rng.bernoulli(0.5) ? magnitude : -magnitude));
  };
  const int w = box.width(), h = box.height();
  Box out{box.x0 + shift(w), box.y0 + shift(h), box.x1 + shift(w), box.y1 + shift(h)};
  out.x0 = std::clamp(out.x0, 0, size.width - 1);
  out.y0 = std::clamp(out.y0, 0, size.height - 1);
  out.x1 = std::clamp(out.x1, out.x0 + 1, size.width);
  out.y1 = std::clamp(out.y1, out.y0 + 1, size.height);
  return out;
}

Box spurious_box(Rng& rng, ImageSize size) {
  const int w = std::min(size.width, rng.uniform_int(10, 24));
  const int h = std::min(size.height, rng.uniform_int(10, 24));
  const int x0 = rng.uniform_int(0, size.width - w);
  const int y0 = rng.uniform_int(0, size.height - h);
  return Box{x0, y0, x0 + w, y0 + h};
}

std::string make_id(const char* prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04d", prefix, index);
  return buf;
}

}  // namespace

void NoiseFractions::validate() const {
  for (double f : {blur, no_polyp, wrong_label, imprecise_box}) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw Error(ErrorKind::kParameter, "noise fractions must lie in [0,1]");
    }
  }
  if (clean() < -1e-9) {
    throw Error(ErrorKind::kParameter, "noise fractions sum to more than 1");
  }
}

void CorpusSpec::validate() const {
  boxboost::validate(size);
  if (size.height < 32 || size.width < 32) {
    throw Error(ErrorKind::kParameter, "synthetic frames must be at least 32x32");
  }
  if (train_mask < 0 || train_box < 0 || test < 0) {
    throw Error(ErrorKind::kParameter, "split sizes must be non-negative");
  }
  noise.validate();
  if (noise.wrong_label > 0.0 && train_box < 2) {
    throw Error(ErrorKind::kParameter, "wrong-label noise needs at least two box records");
  }
}

NoiseCounts noise_counts(const NoiseFractions& f, int n) {
  f.validate();
  auto count = [n](double frac) { return static_cast<int>(std::floor(frac * n + 0.5)); };
  NoiseCounts c;
  c.blur = count(f.blur);
  c.no_polyp = count(f.no_polyp);
  c.wrong_label = count(f.wrong_label);
  c.imprecise_box = count(f.imprecise_box);
  c.clean = n - c.blur - c.no_polyp - c.wrong_label - c.imprecise_box;
  if (c.clean < 0) {
    throw Error(ErrorKind::kParameter, "rounded noise counts exceed the box split size");
  }
  return c;
}

GrayImage gaussian_blur(const GrayImage& image, double sigma) {
  if (!(sigma > 0.0)) return image;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    norm += kernel[i + radius];
  }
  for (double& k : kernel) k /= norm;

  const int h = image.size.height, w = image.size.width;
  std::vector<double> tmp(image.pixels.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int xx = std::clamp(x + i, 0, w - 1);
        acc += kernel[i + radius] * image.pixels[static_cast<std::size_t>(y) * w + xx];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  GrayImage out = image;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += kernel[i + radius] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      out.pixels[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
    }
  }
  return out;
}

SyntheticCorpus synthesize(const CorpusSpec& spec) {
  spec.validate();
  SyntheticCorpus corpus;
  corpus.spec = spec;
  std::uint64_t stream = 0;

  auto add_split = [&](Split split, const char* prefix, int n) {
    for (int i = 0; i < n; ++i) {
      Rng rng(Rng::derive(spec.seed, stream++));
      Frame frame = render_frame(rng, spec.size, true);
      SyntheticSample s;
      s.record.id = make_id(prefix, i);
      s.record.split = split;
      s.record.kind = AnnotationKind::kMask;
      s.record.image = "images/" + s.record.id + ".pgm";
      s.record.ground_truth = "gt/" + s.record.id + ".pgm";
      s.record.mask = split == Split::kTest ? s.record.ground_truth
                                            : "masks/" + s.record.id + ".pgm";
      s.image = std::move(frame.image);
      s.ground_truth = std::move(frame.mask);
      s.true_boxes = std::move(frame.boxes);
      corpus.samples.push_back(std::move(s));
    }
  };
  add_split(Split::kTrainMask, "mask", spec.train_mask);

  // Box split: decide noise modes first so that NO_POLYP frames are rendered
  // without blobs and WRONG_LABEL donors always carry real boxes.
  const NoiseCounts counts = noise_counts(spec.noise, spec.train_box);
  std::vector<NoiseMode> modes;
  modes.insert(modes.end(), counts.clean, NoiseMode::kClean);
  modes.insert(modes.end(), counts.blur, NoiseMode::kBlur);
  modes.insert(modes.end(), counts.no_polyp, NoiseMode::kNoPolyp);
  modes.insert(modes.end(), counts.wrong_label, NoiseMode::kWrongLabel);
  modes.insert(modes.end(), counts.imprecise_box, NoiseMode::kImpreciseBox);
  Rng assign(Rng::derive(spec.seed, 0xB0C5ULL));
  assign.shuffle(modes);

  const std::size_t box_begin = corpus.samples.size();
  for (int i = 0; i < spec.train_box; ++i) {
    Rng rng(Rng::derive(spec.seed, stream++));
    const NoiseMode mode = modes[i];
    Frame frame = render_frame(rng, spec.size, mode != NoiseMode::kNoPolyp);
    SyntheticSample s;
    s.record.id = make_id("box", i);
    s.record.split = Split::kTrainBox;
    s.record.kind = AnnotationKind::kBox;
    s.record.noise = mode;
    s.record.image = "images/" + s.record.id + ".pgm";
    s.record.ground_truth = "gt/" + s.record.id + ".pgm";
    s.true_boxes = frame.boxes;
    switch (mode) {
      case NoiseMode::kClean:
      case NoiseMode::kWrongLabel:  // replaced below once all frames exist
        s.record.boxes = frame.boxes;
        break;
      case NoiseMode::kBlur:
        s.record.boxes = frame.boxes;
        frame.image = gaussian_blur(frame.image, rng.uniform(1.5, 2.5));
        break;
      case NoiseMode::kNoPolyp:
        s.record.boxes = {spurious_box(rng, spec.size)};
        break;
      case NoiseMode::kImpreciseBox:
        for (const Box& b : frame.boxes) s.record.boxes.push_back(jitter_box(rng, b, spec.size));
        break;
    }
    s.image = std::move(frame.image);
    s.ground_truth = std::move(frame.mask);
    corpus.samples.push_back(std::move(s));
  }

  Rng donors(Rng::derive(spec.seed, 0xD0D0ULL));
  for (int i = 0; i < spec.train_box; ++i) {
    SyntheticSample& s = corpus.samples[box_begin + i];
    if (s.record.noise != NoiseMode::kWrongLabel) continue;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const int j = static_cast<int>(donors.below(static_cast<std::uint64_t>(spec.train_box)));
      const SyntheticSample& donor = corpus.samples[box_begin + j];
      if (j == i || donor.true_boxes.empty()) continue;
      s.record.boxes = donor.true_boxes;
      break;
    }
  }

  add_split(Split::kTest, "test", spec.test);
  return corpus;
}

CorpusManifest write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  CorpusManifest manifest;
  manifest.root = dir;
  for (const SyntheticSample& s : corpus.samples) {
    write_image(dir / s.record.image, s.image);
    write_mask(dir / s.record.ground_truth, s.ground_truth);
    if (s.record.split == Split::kTrainMask) write_mask(dir / s.record.mask, s.ground_truth);
    manifest.records.push_back(s.record);
  }
  save_manifest(dir / "manifest.jsonl", manifest.records);
  return manifest;
}

}  // namespace boxboost
