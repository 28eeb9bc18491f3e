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

#ifndef BOXBOOST_TENSOR_HPP_
#define BOXBOOST_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace boxboost {

/// Dense row-major tensor. Activations use shape {C, H, W}; convolution
/// weights use {out, in, k, k}.
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s, T fill = T(0)) : shape(std::move(s)) {
    data.assign(count(shape), fill);
  }

  static std::size_t count(const std::vector<int>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1},
                           [](std::size_t a, int d) { return a * static_cast<std::size_t>(d); });
  }

  std::size_t numel() const { return data.size(); }
  int channels() const { return shape[0]; }
  int height() const { return shape[1]; }
  int width() const { return shape[2]; }

  T* plane(int c) { return data.data() + static_cast<std::size_t>(c) * height() * width(); }
  const T* plane(int c) const {
    return data.data() + static_cast<std::size_t>(c) * height() * width();
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    return out;
  }

  bool operator==(const Tensor&) const = default;
};

}  // namespace boxboost

#endif  // BOXBOOST_TENSOR_HPP_
