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

#include "boxboost/adamw.hpp"

#include <cmath>
#include <string>

#include "boxboost/error.hpp"

namespace boxboost {

void AdamWConfig::validate() const {
  if (!(lr > 0.0)) throw Error(ErrorKind::kParameter, "AdamW: lr must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error(ErrorKind::kParameter, "AdamW: betas must lie in [0,1)");
  }
  if (!(eps > 0.0)) throw Error(ErrorKind::kParameter, "AdamW: eps must be > 0");
  if (!(weight_decay >= 0.0)) {
    throw Error(ErrorKind::kParameter, "AdamW: weight_decay must be >= 0");
  }
}

template <typename T>
void adamw_step(std::vector<Tensor<T>>& params, const std::vector<Tensor<T>>& grads,
                const AdamWConfig& cfg, AdamWState<T>& state, std::uint64_t t,
                const std::vector<bool>* skip) {
  cfg.validate();
  if (t < 1) throw Error(ErrorKind::kParameter, "AdamW: step index must be >= 1");
  if (grads.size() != params.size()) {
    throw Error(ErrorKind::kShape, "AdamW: " + std::to_string(grads.size()) +
                                       " gradients for " + std::to_string(params.size()) +
                                       " parameters");
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.shape);
      state.v.emplace_back(p.shape);
    }
  }
  if (state.m.size() != params.size()) {
    throw Error(ErrorKind::kShape, "AdamW: moment buffers do not match parameter count");
  }

  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].shape != params[i].shape || state.m[i].shape != params[i].shape) {
      throw Error(ErrorKind::kShape, "AdamW: shape mismatch at tensor " + std::to_string(i));
    }
    if (skip && (*skip)[i]) continue;
    auto& theta = params[i].data;
    const auto& g = grads[i].data;
    auto& m = state.m[i].data;
    auto& v = state.v[i].data;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double gj = g[j];
      const double mj = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gj;
      const double vj = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gj * gj;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double m_hat = mj / bc1;
      const double v_hat = vj / bc2;
      const double th = theta[j];
      theta[j] = static_cast<T>(th - cfg.lr * (m_hat / (std::sqrt(v_hat) + cfg.eps)) -
                                cfg.lr * cfg.weight_decay * th);
    }
  }
}

template <typename T>
void adamw_step(Network<T>& net, const std::vector<Tensor<T>>& grads, const AdamWConfig& cfg,
                AdamWState<T>& state) {
  std::vector<bool> skip(net.params().size());
  for (std::size_t i = 0; i < skip.size(); ++i) skip[i] = !net.trainable(i);
  const std::uint64_t t = net.step() + 1;
  adamw_step(net.mutable_params(), grads, cfg, state, t, &skip);
  net.set_step(t);
}

template void adamw_step<float>(std::vector<Tensor<float>>&, const std::vector<Tensor<float>>&,
                                const AdamWConfig&, AdamWState<float>&, std::uint64_t,
                                const std::vector<bool>*);
template void adamw_step<double>(std::vector<Tensor<double>>&,
                                 const std::vector<Tensor<double>>&, const AdamWConfig&,
                                 AdamWState<double>&, std::uint64_t, const std::vector<bool>*);
template void adamw_step<float>(Network<float>&, const std::vector<Tensor<float>>&,
                                const AdamWConfig&, AdamWState<float>&);
template void adamw_step<double>(Network<double>&, const std::vector<Tensor<double>>&,
                                 const AdamWConfig&, AdamWState<double>&);

}  // namespace boxboost
