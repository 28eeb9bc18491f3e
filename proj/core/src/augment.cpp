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

#include "boxboost/augment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "boxboost/random.hpp"

namespace boxboost {

namespace {

struct Grid {
  int h = 0;
  int w = 0;
};

// Flips and quarter turns are exact permutations of the pixel grid.
template <typename V>
std::vector<V> permute(const V* src, Grid g, const Transform& t, Grid* out_grid) {
  std::vector<V> cur(src, src + static_cast<std::size_t>(g.h) * g.w);
  if (t.flip_h || t.flip_v) {
    std::vector<V> next(cur.size());
    for (int y = 0; y < g.h; ++y) {
      for (int x = 0; x < g.w; ++x) {
        const int sy = t.flip_v ? g.h - 1 - y : y;
        const int sx = t.flip_h ? g.w - 1 - x : x;
        next[static_cast<std::size_t>(y) * g.w + x] = cur[static_cast<std::size_t>(sy) * g.w + sx];
      }
    }
    cur.swap(next);
  }
  for (int turn = 0; turn < ((t.quarter_turns % 4) + 4) % 4; ++turn) {
    // Counter-clockwise: out(i, j) = in(j, W - 1 - i), out is W x H.
    const Grid r{g.w, g.h};
    std::vector<V> next(cur.size());
    for (int i = 0; i < r.h; ++i) {
      for (int j = 0; j < r.w; ++j) {
        next[static_cast<std::size_t>(i) * r.w + j] =
            cur[static_cast<std::size_t>(j) * g.w + (g.w - 1 - i)];
      }
    }
    cur.swap(next);
    g = r;
  }
  *out_grid = g;
  return cur;
}

int nearest_source(int dst, int dst_len, int src_len) {
  const int s = static_cast<int>(std::floor((dst + 0.5) * src_len / dst_len));
  return std::clamp(s, 0, src_len - 1);
}

template <typename V>
std::vector<V> resize_nearest(const std::vector<V>& src, Grid g, Grid out) {
  if (g.h == out.h && g.w == out.w) return src;
  std::vector<V> dst(static_cast<std::size_t>(out.h) * out.w);
  for (int y = 0; y < out.h; ++y) {
    const int sy = nearest_source(y, out.h, g.h);
    for (int x = 0; x < out.w; ++x) {
      dst[static_cast<std::size_t>(y) * out.w + x] =
          src[static_cast<std::size_t>(sy) * g.w + nearest_source(x, out.w, g.w)];
    }
  }
  return dst;
}

std::vector<float> resize_bilinear(const std::vector<float>& src, Grid g, Grid out) {
  if (g.h == out.h && g.w == out.w) return src;
  std::vector<float> dst(static_cast<std::size_t>(out.h) * out.w);
  auto coord = [](int d, int dst_len, int src_len, int* i0, int* i1, double* frac) {
    double u = (d + 0.5) * src_len / dst_len - 0.5;
    u = std::clamp(u, 0.0, static_cast<double>(src_len - 1));
    *i0 = static_cast<int>(std::floor(u));
    *i1 = std::min(*i0 + 1, src_len - 1);
    *frac = u - *i0;
  };
  for (int y = 0; y < out.h; ++y) {
    int y0, y1;
    double fy;
    coord(y, out.h, g.h, &y0, &y1, &fy);
    for (int x = 0; x < out.w; ++x) {
      int x0, x1;
      double fx;
      coord(x, out.w, g.w, &x0, &x1, &fx);
      auto at = [&](int yy, int xx) {
        return static_cast<double>(src[static_cast<std::size_t>(yy) * g.w + xx]);
      };
      const double top = at(y0, x0) * (1 - fx) + at(y0, x1) * fx;
      const double bot = at(y1, x0) * (1 - fx) + at(y1, x1) * fx;
      dst[static_cast<std::size_t>(y) * out.w + x] = static_cast<float>(top * (1 - fy) + bot * fy);
    }
  }
  return dst;
}

template <typename V>
std::vector<V> transform_plane(const V* src, Grid g, const Transform& t, ImageSize out_size) {
  Grid rotated;
  std::vector<V> permuted = permute(src, g, t, &rotated);
  return resize_nearest(permuted, rotated, Grid{out_size.height, out_size.width});
}

}  // namespace

Transform sample_transform(std::uint64_t seed) {
  Rng rng(seed);
  Transform t;
  t.flip_h = rng.bernoulli(0.5);
  t.flip_v = rng.bernoulli(0.5);
  t.quarter_turns = static_cast<int>(rng.below(4));
  t.scale = kAugmentScales[rng.below(kAugmentScales.size())];
  return t;
}

ImageSize transformed_size(const Transform& t, ImageSize size, int size_multiple) {
  ImageSize rotated = (t.quarter_turns % 2 != 0) ? ImageSize{size.width, size.height} : size;
  if (t.scale == 1.0) return rotated;
  const int m = std::max(1, size_multiple);
  auto side = [&](int n) {
    const int k = static_cast<int>(std::lround(n * t.scale / m));
    return std::max(1, k) * m;
  };
  return ImageSize{side(rotated.height), side(rotated.width)};
}

Tensor<float> apply_to_image(const Transform& t, const Tensor<float>& image, int size_multiple) {
  const Grid g{image.height(), image.width()};
  const ImageSize out_size = transformed_size(t, ImageSize{g.h, g.w}, size_multiple);
  Tensor<float> out({image.channels(), out_size.height, out_size.width});
  for (int c = 0; c < image.channels(); ++c) {
    Grid rotated;
    const std::vector<float> permuted = permute(image.plane(c), g, t, &rotated);
    const std::vector<float> resized =
        resize_bilinear(permuted, rotated, Grid{out_size.height, out_size.width});
    std::copy(resized.begin(), resized.end(), out.plane(c));
  }
  return out;
}

TriLabelMask apply_to_labels(const Transform& t, const TriLabelMask& labels, int size_multiple) {
  const ImageSize out_size = transformed_size(t, labels.size(), size_multiple);
  return TriLabelMask(out_size, transform_plane(labels.labels().data(),
                                                Grid{labels.size().height, labels.size().width},
                                                t, out_size));
}

BinaryMask apply_to_mask(const Transform& t, const BinaryMask& mask, int size_multiple) {
  const ImageSize out_size = transformed_size(t, mask.size(), size_multiple);
  return BinaryMask(out_size, transform_plane(mask.bits().data(),
                                              Grid{mask.height(), mask.width()}, t, out_size));
}

std::pair<Tensor<float>, TriLabelMask> augment(const Tensor<float>& image,
                                               const TriLabelMask& labels, std::uint64_t seed,
                                               int size_multiple) {
  const Transform t = sample_transform(seed);
  return {apply_to_image(t, image, size_multiple), apply_to_labels(t, labels, size_multiple)};
}

}  // namespace boxboost
