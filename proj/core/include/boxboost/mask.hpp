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

// Mask value types, box rasterization, binary set algebra and overlap metrics.
//
// All functions here are pure; masks are plain values and may be shared
// across threads freely.

#ifndef BOXBOOST_MASK_HPP_
#define BOXBOOST_MASK_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace boxboost {

struct ImageSize {
  int height = 0;
  int width = 0;

  std::size_t pixels() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  bool operator==(const ImageSize&) const = default;
};

/// Throws kParameter unless both dimensions are >= 1.
void validate(const ImageSize& size);
std::string to_string(const ImageSize& size);

/// Axis-aligned box, half-open: covers [x0, x1) x [y0, y1).
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  long area() const { return static_cast<long>(width()) * height(); }
  bool valid_within(const ImageSize& size) const {
    return 0 <= x0 && x0 < x1 && x1 <= size.width && 0 <= y0 && y0 < y1 &&
           y1 <= size.height;
  }
  bool operator==(const Box&) const = default;
};

std::string to_string(const Box& box);

class BinaryMask {
 public:
  BinaryMask() = default;
  /// All-zero mask.
  explicit BinaryMask(ImageSize size);
  BinaryMask(ImageSize size, std::vector<std::uint8_t> bits);

  static BinaryMask filled(ImageSize size, bool value);

  const ImageSize& size() const { return size_; }
  int height() const { return size_.height; }
  int width() const { return size_.width; }

  bool at(int y, int x) const { return bits_[index(y, x)] != 0; }
  void set(int y, int x, bool value) { bits_[index(y, x)] = value ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t count() const;
  bool empty() const { return count() == 0; }

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * size_.width + x;
  }

  ImageSize size_;
  std::vector<std::uint8_t> bits_;  // 0 or 1, row-major
};

/// Per-pixel foreground probability in [0, 1].
class ProbMap {
 public:
  ProbMap() = default;
  ProbMap(ImageSize size, double fill);
  /// Throws kParameter if any value lies outside [0, 1] or is not finite.
  ProbMap(ImageSize size, std::vector<double> values);

  const ImageSize& size() const { return size_; }
  double at(int y, int x) const {
    return values_[static_cast<std::size_t>(y) * size_.width + x];
  }
  std::span<const double> values() const { return values_; }

  bool operator==(const ProbMap&) const = default;

 private:
  ImageSize size_;
  std::vector<double> values_;
};

enum class Label : std::uint8_t { kBackground = 0, kForeground = 1, kUncertain = 2 };

class TriLabelMask {
 public:
  TriLabelMask() = default;
  TriLabelMask(ImageSize size, Label fill);
  TriLabelMask(ImageSize size, std::vector<Label> labels);

  /// Fully certain labels: FG where mask is set, BG elsewhere.
  static TriLabelMask from_binary(const BinaryMask& mask);

  const ImageSize& size() const { return size_; }
  Label at(int y, int x) const {
    return labels_[static_cast<std::size_t>(y) * size_.width + x];
  }
  void set(int y, int x, Label label) {
    labels_[static_cast<std::size_t>(y) * size_.width + x] = label;
  }
  std::span<const Label> labels() const { return labels_; }

  BinaryMask region(Label label) const;
  std::size_t count(Label label) const;

  bool operator==(const TriLabelMask&) const = default;

 private:
  ImageSize size_;
  std::vector<Label> labels_;
};

/// Union of the given boxes. Throws kInvalidAnnotation naming the first box
/// that does not fit inside `size`.
BinaryMask rasterize_boxes(std::span<const Box> boxes, ImageSize size);

/// bit = value > threshold (strict). Threshold must lie in [0, 1].
BinaryMask binarize(const ProbMap& prob, double threshold);

/// 2|b n p| / (|b| + |p|); both empty is defined as 1.0.
double dice(const BinaryMask& b, const BinaryMask& p);
/// |b n p| / |b u p|; both empty is defined as 1.0.
double iou(const BinaryMask& b, const BinaryMask& p);

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b);
BinaryMask unite(const BinaryMask& a, const BinaryMask& b);
BinaryMask complement(const BinaryMask& m);

/// Tight bounding box of the set pixels; requires a non-empty mask.
Box bounding_box(const BinaryMask& mask);

}  // namespace boxboost

#endif  // BOXBOOST_MASK_HPP_
