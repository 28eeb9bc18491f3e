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

#include "boxboost/mask.hpp"

#include <algorithm>
#include <cmath>

#include "boxboost/error.hpp"

namespace boxboost {

namespace {

void require_same_size(const ImageSize& a, const ImageSize& b, const char* op) {
  if (a != b) {
    throw Error(ErrorKind::kShape, std::string(op) + ": size mismatch " +
                                       to_string(a) + " vs " + to_string(b));
  }
}

std::size_t overlap_count(const BinaryMask& a, const BinaryMask& b) {
  const auto x = a.bits();
  const auto y = b.bits();
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) n += x[i] & y[i];
  return n;
}

}  // namespace

void validate(const ImageSize& size) {
  if (size.height < 1 || size.width < 1) {
    throw Error(ErrorKind::kParameter, "image size must be at least 1x1, got " +
                                           to_string(size));
  }
}

std::string to_string(const ImageSize& size) {
  return std::to_string(size.height) + "x" + std::to_string(size.width);
}

std::string to_string(const Box& box) {
  return "[" + std::to_string(box.x0) + "," + std::to_string(box.y0) + "," +
         std::to_string(box.x1) + "," + std::to_string(box.y1) + "]";
}

BinaryMask::BinaryMask(ImageSize size) : size_(size) {
  validate(size);
  bits_.assign(size.pixels(), 0);
}

BinaryMask::BinaryMask(ImageSize size, std::vector<std::uint8_t> bits)
    : size_(size), bits_(std::move(bits)) {
  validate(size);
  if (bits_.size() != size.pixels()) {
    throw Error(ErrorKind::kShape, "BinaryMask: expected " +
                                       std::to_string(size.pixels()) +
                                       " bits, got " + std::to_string(bits_.size()));
  }
  for (auto& b : bits_) {
    if (b > 1) throw Error(ErrorKind::kParameter, "BinaryMask: bit value > 1");
  }
}

BinaryMask BinaryMask::filled(ImageSize size, bool value) {
  validate(size);
  return BinaryMask(size, std::vector<std::uint8_t>(size.pixels(), value ? 1 : 0));
}

std::size_t BinaryMask::count() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

ProbMap::ProbMap(ImageSize size, double fill) : size_(size) {
  validate(size);
  if (!(fill >= 0.0 && fill <= 1.0)) {
    throw Error(ErrorKind::kParameter, "ProbMap: fill value outside [0,1]");
  }
  values_.assign(size.pixels(), fill);
}

ProbMap::ProbMap(ImageSize size, std::vector<double> values)
    : size_(size), values_(std::move(values)) {
  validate(size);
  if (values_.size() != size.pixels()) {
    throw Error(ErrorKind::kShape, "ProbMap: expected " +
                                       std::to_string(size.pixels()) +
                                       " values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    // NaN fails both comparisons.
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::kParameter, "ProbMap: value outside [0,1]");
    }
  }
}

TriLabelMask::TriLabelMask(ImageSize size, Label fill) : size_(size) {
  validate(size);
  labels_.assign(size.pixels(), fill);
}

TriLabelMask::TriLabelMask(ImageSize size, std::vector<Label> labels)
    : size_(size), labels_(std::move(labels)) {
  validate(size);
  if (labels_.size() != size.pixels()) {
    throw Error(ErrorKind::kShape, "TriLabelMask: label count mismatch");
  }
  for (auto l : labels_) {
    if (static_cast<int>(l) > 2) {
      throw Error(ErrorKind::kParameter, "TriLabelMask: invalid label value");
    }
  }
}

TriLabelMask TriLabelMask::from_binary(const BinaryMask& mask) {
  std::vector<Label> labels(mask.size().pixels());
  const auto bits = mask.bits();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = bits[i] ? Label::kForeground : Label::kBackground;
  }
  return TriLabelMask(mask.size(), std::move(labels));
}

BinaryMask TriLabelMask::region(Label label) const {
  std::vector<std::uint8_t> bits(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) bits[i] = labels_[i] == label;
  return BinaryMask(size_, std::move(bits));
}

std::size_t TriLabelMask::count(Label label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

BinaryMask rasterize_boxes(std::span<const Box> boxes, ImageSize size) {
  BinaryMask mask(size);
  for (const Box& box : boxes) {
    if (!box.valid_within(size)) {
      throw Error(ErrorKind::kInvalidAnnotation,
                  "box " + to_string(box) + " is not valid within image " +
                      to_string(size));
    }
    for (int y = box.y0; y < box.y1; ++y) {
      for (int x = box.x0; x < box.x1; ++x) mask.set(y, x, true);
    }
  }
  return mask;
}

BinaryMask binarize(const ProbMap& prob, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::kParameter, "binarize: threshold " +
                                           std::to_string(threshold) +
                                           " outside [0,1]");
  }
  const auto v = prob.values();
  std::vector<std::uint8_t> bits(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) bits[i] = v[i] > threshold;
  return BinaryMask(prob.size(), std::move(bits));
}

double dice(const BinaryMask& b, const BinaryMask& p) {
  require_same_size(b.size(), p.size(), "dice");
  const std::size_t denom = b.count() + p.count();
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(overlap_count(b, p)) / static_cast<double>(denom);
}

double iou(const BinaryMask& b, const BinaryMask& p) {
  require_same_size(b.size(), p.size(), "iou");
  const std::size_t inter = overlap_count(b, p);
  const std::size_t uni = b.count() + p.count() - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b) {
  require_same_size(a.size(), b.size(), "intersect");
  std::vector<std::uint8_t> bits(a.size().pixels());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = a.bits()[i] & b.bits()[i];
  return BinaryMask(a.size(), std::move(bits));
}

BinaryMask unite(const BinaryMask& a, const BinaryMask& b) {
  require_same_size(a.size(), b.size(), "union");
  std::vector<std::uint8_t> bits(a.size().pixels());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = a.bits()[i] | b.bits()[i];
  return BinaryMask(a.size(), std::move(bits));
}

BinaryMask complement(const BinaryMask& m) {
  std::vector<std::uint8_t> bits(m.size().pixels());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = m.bits()[i] ^ 1;
  return BinaryMask(m.size(), std::move(bits));
}

Box bounding_box(const BinaryMask& mask) {
  Box box{mask.width(), mask.height(), 0, 0};
  bool any = false;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(y, x)) continue;
      any = true;
      box.x0 = std::min(box.x0, x);
      box.y0 = std::min(box.y0, y);
      box.x1 = std::max(box.x1, x + 1);
      box.y1 = std::max(box.y1, y + 1);
    }
  }
  if (!any) throw Error(ErrorKind::kParameter, "bounding_box: empty mask");
  return box;
}

}  // namespace boxboost
