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

// Two small fully-convolutional segmentation networks with hand-written
// forward and backward passes.
//
// Arch A: three-stage encoder-decoder, 3x3 kernels, two 2x poolings.
//   conv3 -> relu -> [skip0] -> pool -> conv3 -> relu -> [skip1] -> pool
//   -> conv3 -> relu -> conv3 -> relu -> up -> +skip1 -> conv3 -> relu
//   -> up -> +skip0 -> head conv3 -> logits
//
// Arch B: two-stage, wider, 5x5 stem and dilated 3x3 body, one pooling.
//   conv5 -> relu -> [skip0] -> pool -> dconv3 -> relu -> dconv3 -> relu
//   -> up -> +skip0 -> head conv1 -> logits
//
// Networks are templated on the scalar type: float for training, double for
// finite-difference gradient checks. The head is zero-initialised, so a fresh
// network outputs logits 0 everywhere.

#ifndef BOXBOOST_NETWORK_HPP_
#define BOXBOOST_NETWORK_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "boxboost/tensor.hpp"

namespace boxboost {

enum class Arch { kA, kB };

const char* to_string(Arch arch);
Arch arch_from_string(const std::string& name);

struct NetworkConfig {
  Arch arch = Arch::kA;
  int in_channels = 1;
  /// A: {stage1, stage2, stage3}; B: {width}.
  std::vector<int> widths = {8, 16, 16};
  /// Stem kernel size (A: 3, B: 5).
  int kernel = 3;
  /// Dilation of the low-resolution body convolutions (A: 1, B: 2).
  int dilation = 1;
  std::uint64_t seed = 0;

  static NetworkConfig arch_a(std::uint64_t seed = 0);
  static NetworkConfig arch_b(std::uint64_t seed = 0);

  /// Throws kParameter for inconsistent settings.
  void validate() const;
  int downsample_factor() const;
  int depth() const;
  /// Conservative bound on how far (in pixels, Chebyshev distance) an input
  /// pixel can influence an output logit.
  int receptive_radius() const;

  bool operator==(const NetworkConfig&) const = default;
};

struct LayerSpec {
  enum class Kind { kConv, kRelu, kPool, kUp, kSave, kAdd };
  Kind kind = Kind::kRelu;
  int in = 0;
  int out = 0;
  int kernel = 1;
  int dilation = 1;
  int slot = 0;       // skip slot for kSave / kAdd
  int param = -1;     // index of the weight tensor for kConv (bias is param+1)
};

std::vector<LayerSpec> build_layers(const NetworkConfig& cfg);

template <typename T>
class Network {
 public:
  /// Activations of one forward pass; valid until the parameters change.
  struct Cache {
    std::vector<Tensor<T>> acts;  // acts[0] = input, acts[i+1] = layer i output
    std::uint64_t version = 0;
    const Network* owner = nullptr;
  };

  struct Output {
    Tensor<T> logits;  // {1, H, W}
    Cache cache;
  };

  explicit Network(NetworkConfig cfg);

  template <typename U>
  explicit Network(const Network<U>& other)
      : cfg_(other.config()), layers_(build_layers(cfg_)), step_(other.step()) {
    for (const auto& p : other.params()) params_.push_back(p.template cast<T>());
    names_ = other.param_names();
    trainable_.assign(params_.size(), true);
  }

  const NetworkConfig& config() const { return cfg_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }

  const std::vector<Tensor<T>>& params() const { return params_; }
  const std::vector<std::string>& param_names() const { return names_; }
  std::size_t num_parameters() const;

  /// Mutable access bumps the version, invalidating outstanding caches.
  std::vector<Tensor<T>>& mutable_params() {
    ++version_;
    return params_;
  }
  void set_params(std::vector<Tensor<T>> params);

  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t step) { step_ = step; }

  /// Frozen tensors receive exactly-zero gradients.
  void set_trainable(std::size_t param_index, bool trainable);
  bool trainable(std::size_t param_index) const { return trainable_.at(param_index); }

  /// Input {C_in, H, W}; H and W must be multiples of downsample_factor().
  Output forward(const Tensor<T>& input) const;

  /// Parameter gradients for upstream d(loss)/d(logits). Throws kUsage if the
  /// cache came from another network or from before a parameter change.
  std::vector<Tensor<T>> backward(const Cache& cache, const Tensor<T>& grad_logits) const;

  /// Zero tensors shaped like the parameters.
  std::vector<Tensor<T>> zero_gradients() const;

 private:
  NetworkConfig cfg_;
  std::vector<LayerSpec> layers_;
  std::vector<Tensor<T>> params_;
  std::vector<std::string> names_;
  std::vector<bool> trainable_;
  std::uint64_t step_ = 0;
  std::uint64_t version_ = 1;
};

extern template class Network<float>;
extern template class Network<double>;

template <typename T>
inline T sigmoid(T z) {
  if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

}  // namespace boxboost

#endif  // BOXBOOST_NETWORK_HPP_
