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

#ifndef BOXBOOST_ADAMW_HPP_
#define BOXBOOST_ADAMW_HPP_

#include <cstdint>
#include <vector>

#include "boxboost/network.hpp"
#include "boxboost/tensor.hpp"

namespace boxboost {

struct AdamWConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;

  void validate() const;
};

/// First and second moment buffers, lazily shaped on the first step.
template <typename T>
struct AdamWState {
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
};

/// One decoupled-weight-decay Adam update at step t (t >= 1):
///   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * theta
/// Tensors whose `skip` flag is set are left untouched.
template <typename T>
void adamw_step(std::vector<Tensor<T>>& params, const std::vector<Tensor<T>>& grads,
                const AdamWConfig& cfg, AdamWState<T>& state, std::uint64_t t,
                const std::vector<bool>* skip = nullptr);

/// Convenience: steps every trainable tensor of `net` and advances its step
/// counter.
template <typename T>
void adamw_step(Network<T>& net, const std::vector<Tensor<T>>& grads, const AdamWConfig& cfg,
                AdamWState<T>& state);

}  // namespace boxboost

#endif  // BOXBOOST_ADAMW_HPP_
