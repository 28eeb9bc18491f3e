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

#include "boxboost/network.hpp"

#include <algorithm>
#include <cmath>

#include "boxboost/error.hpp"
#include "boxboost/random.hpp"

namespace boxboost {

const char* to_string(Arch arch) { return arch == Arch::kA ? "A" : "B"; }

Arch arch_from_string(const std::string& name) {
  if (name == "A" || name == "a") return Arch::kA;
  if (name == "B" || name == "b") return Arch::kB;
  throw Error(ErrorKind::kParameter, "unknown architecture '" + name + "' (expected A or B)");
}

NetworkConfig NetworkConfig::arch_a(std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.arch = Arch::kA;
  cfg.widths = {8, 16, 16};
  cfg.kernel = 3;
  cfg.dilation = 1;
  cfg.seed = seed;
  return cfg;
}

NetworkConfig NetworkConfig::arch_b(std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.arch = Arch::kB;
  cfg.widths = {12};
  cfg.kernel = 5;
  cfg.dilation = 2;
  cfg.seed = seed;
  return cfg;
}

void NetworkConfig::validate() const {
  const std::size_t expected = arch == Arch::kA ? 3 : 1;
  if (widths.size() != expected) {
    throw Error(ErrorKind::kParameter, std::string("arch ") + to_string(arch) + " expects " +
                                           std::to_string(expected) + " widths");
  }
  for (int w : widths) {
    if (w < 1) throw Error(ErrorKind::kParameter, "network widths must be >= 1");
  }
  if (in_channels < 1) throw Error(ErrorKind::kParameter, "in_channels must be >= 1");
  if (kernel < 1 || kernel % 2 == 0) {
    throw Error(ErrorKind::kParameter, "kernel must be a positive odd number");
  }
  if (dilation < 1) throw Error(ErrorKind::kParameter, "dilation must be >= 1");
}

int NetworkConfig::downsample_factor() const { return arch == Arch::kA ? 4 : 2; }

int NetworkConfig::depth() const { return arch == Arch::kA ? 3 : 2; }

int NetworkConfig::receptive_radius() const {
  // Track, per layer, the half-width of the input window a feature depends on,
  // measured beyond the input footprint of the feature cell itself.
  int radius = 0;
  int stride = 1;
  std::vector<int> saved(4, 0);
  for (const LayerSpec& layer : build_layers(*this)) {
    switch (layer.kind) {
      case LayerSpec::Kind::kConv:
        radius += (layer.kernel - 1) / 2 * layer.dilation * stride;
        break;
      case LayerSpec::Kind::kPool:
        stride *= 2;
        break;
      case LayerSpec::Kind::kUp:
        stride /= 2;
        radius += stride;
        break;
      case LayerSpec::Kind::kSave:
        saved[layer.slot] = radius;
        break;
      case LayerSpec::Kind::kAdd:
        radius = std::max(radius, saved[layer.slot]);
        break;
      case LayerSpec::Kind::kRelu:
        break;
    }
  }
  return radius;
}

std::vector<LayerSpec> build_layers(const NetworkConfig& cfg) {
  cfg.validate();
  using K = LayerSpec::Kind;
  std::vector<LayerSpec> layers;
  int next_param = 0;
  auto conv = [&](int in, int out, int k, int d) {
    LayerSpec l;
    l.kind = K::kConv;
    l.in = in;
    l.out = out;
    l.kernel = k;
    l.dilation = d;
    l.param = next_param;
    next_param += 2;
    layers.push_back(l);
  };
  auto simple = [&](K kind, int slot = 0) {
    LayerSpec l;
    l.kind = kind;
    l.slot = slot;
    layers.push_back(l);
  };

  if (cfg.arch == Arch::kA) {
    const int w1 = cfg.widths[0], w2 = cfg.widths[1], w3 = cfg.widths[2];
    conv(cfg.in_channels, w1, cfg.kernel, 1);
    simple(K::kRelu);
    simple(K::kSave, 0);
    simple(K::kPool);
    conv(w1, w2, 3, cfg.dilation);
    simple(K::kRelu);
    simple(K::kSave, 1);
    simple(K::kPool);
    conv(w2, w3, 3, cfg.dilation);
    simple(K::kRelu);
    conv(w3, w2, 3, cfg.dilation);
    simple(K::kRelu);
    simple(K::kUp);
    simple(K::kAdd, 1);
    conv(w2, w1, 3, 1);
    simple(K::kRelu);
    simple(K::kUp);
    simple(K::kAdd, 0);
    conv(w1, 1, 3, 1);
  } else {
    const int w = cfg.widths[0];
    conv(cfg.in_channels, w, cfg.kernel, 1);
    simple(K::kRelu);
    simple(K::kSave, 0);
    simple(K::kPool);
    conv(w, w, 3, cfg.dilation);
    simple(K::kRelu);
    conv(w, w, 3, cfg.dilation);
    simple(K::kRelu);
    simple(K::kUp);
    simple(K::kAdd, 0);
    conv(w, 1, 1, 1);
  }
  return layers;
}

namespace {

// Same-padded 2D convolution over {C, H, W}; weight {out, in, k, k}.
template <typename T>
void conv_forward(const Tensor<T>& in, const Tensor<T>& weight, const Tensor<T>& bias,
                  int dilation, Tensor<T>& out) {
  const int cin = in.channels(), h = in.height(), w = in.width();
  const int cout = weight.shape[0], k = weight.shape[2];
  const int pad = (k - 1) / 2 * dilation;
  out = Tensor<T>({cout, h, w});
  for (int oc = 0; oc < cout; ++oc) {
    T* dst = out.plane(oc);
    std::fill(dst, dst + static_cast<std::size_t>(h) * w, bias.data[oc]);
    for (int ic = 0; ic < cin; ++ic) {
      const T* src = in.plane(ic);
      const T* wk = weight.data.data() + (static_cast<std::size_t>(oc) * cin + ic) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky * dilation - pad;
        const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx * dilation - pad;
          const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
          const T wv = wk[ky * k + kx];
          for (int y = y0; y < y1; ++y) {
            T* drow = dst + static_cast<std::size_t>(y) * w;
            const T* srow = src + static_cast<std::size_t>(y + dy) * w + dx;
            for (int x = x0; x < x1; ++x) drow[x] += wv * srow[x];
          }
        }
      }
    }
  }
}

// Accumulates weight/bias gradients (when requested) and returns the input
// gradient.
template <typename T>
Tensor<T> conv_backward(const Tensor<T>& in, const Tensor<T>& weight, int dilation,
                        const Tensor<T>& grad_out, Tensor<T>* grad_weight,
                        Tensor<T>* grad_bias, bool need_input_grad) {
  const int cin = in.channels(), h = in.height(), w = in.width();
  const int cout = weight.shape[0], k = weight.shape[2];
  const int pad = (k - 1) / 2 * dilation;
  Tensor<T> grad_in;
  if (need_input_grad) grad_in = Tensor<T>({cin, h, w});
  for (int oc = 0; oc < cout; ++oc) {
    const T* go = grad_out.plane(oc);
    if (grad_bias) {
      T s = 0;
      for (std::size_t i = 0; i < static_cast<std::size_t>(h) * w; ++i) s += go[i];
      grad_bias->data[oc] += s;
    }
    for (int ic = 0; ic < cin; ++ic) {
      const T* src = in.plane(ic);
      T* gi = need_input_grad ? grad_in.plane(ic) : nullptr;
      const std::size_t wbase = (static_cast<std::size_t>(oc) * cin + ic) * k * k;
      const T* wk = weight.data.data() + wbase;
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky * dilation - pad;
        const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx * dilation - pad;
          const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
          const T wv = wk[ky * k + kx];
          T acc = 0;
          for (int y = y0; y < y1; ++y) {
            const T* grow = go + static_cast<std::size_t>(y) * w;
            const std::size_t soff = static_cast<std::size_t>(y + dy) * w + dx;
            const T* srow = src + soff;
            if (grad_weight) {
              for (int x = x0; x < x1; ++x) acc += grow[x] * srow[x];
            }
            if (gi) {
              T* girow = gi + soff;
              for (int x = x0; x < x1; ++x) girow[x] += wv * grow[x];
            }
          }
          if (grad_weight) grad_weight->data[wbase + ky * k + kx] += acc;
        }
      }
    }
  }
  return grad_in;
}

template <typename T>
Tensor<T> avg_pool2(const Tensor<T>& in) {
  const int c = in.channels(), h = in.height() / 2, w = in.width() / 2;
  Tensor<T> out({c, h, w});
  const int iw = in.width();
  for (int ch = 0; ch < c; ++ch) {
    const T* src = in.plane(ch);
    T* dst = out.plane(ch);
    for (int y = 0; y < h; ++y) {
      const T* r0 = src + static_cast<std::size_t>(2 * y) * iw;
      const T* r1 = r0 + iw;
      for (int x = 0; x < w; ++x) {
        dst[y * w + x] = T(0.25) * (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]);
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> avg_pool2_backward(const Tensor<T>& grad_out) {
  const int c = grad_out.channels(), h = grad_out.height(), w = grad_out.width();
  Tensor<T> grad_in({c, 2 * h, 2 * w});
  for (int ch = 0; ch < c; ++ch) {
    const T* g = grad_out.plane(ch);
    T* gi = grad_in.plane(ch);
    for (int y = 0; y < 2 * h; ++y) {
      for (int x = 0; x < 2 * w; ++x) {
        gi[static_cast<std::size_t>(y) * 2 * w + x] = T(0.25) * g[(y / 2) * w + x / 2];
      }
    }
  }
  return grad_in;
}

template <typename T>
Tensor<T> upsample2(const Tensor<T>& in) {
  const int c = in.channels(), h = in.height(), w = in.width();
  Tensor<T> out({c, 2 * h, 2 * w});
  for (int ch = 0; ch < c; ++ch) {
    const T* src = in.plane(ch);
    T* dst = out.plane(ch);
    for (int y = 0; y < 2 * h; ++y) {
      for (int x = 0; x < 2 * w; ++x) {
        dst[static_cast<std::size_t>(y) * 2 * w + x] = src[(y / 2) * w + x / 2];
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> upsample2_backward(const Tensor<T>& grad_out) {
  const int c = grad_out.channels(), h = grad_out.height() / 2, w = grad_out.width() / 2;
  Tensor<T> grad_in({c, h, w});
  const int ow = grad_out.width();
  for (int ch = 0; ch < c; ++ch) {
    const T* g = grad_out.plane(ch);
    T* gi = grad_in.plane(ch);
    for (int y = 0; y < h; ++y) {
      const T* r0 = g + static_cast<std::size_t>(2 * y) * ow;
      const T* r1 = r0 + ow;
      for (int x = 0; x < w; ++x) {
        gi[y * w + x] = r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1];
      }
    }
  }
  return grad_in;
}

}  // namespace

template <typename T>
Network<T>::Network(NetworkConfig cfg) : cfg_(std::move(cfg)), layers_(build_layers(cfg_)) {
  // Initialise in double from a single stream so that float and double
  // networks with the same seed hold the same (rounded) values.
  Rng rng(cfg_.seed);
  int conv_index = 0;
  const LayerSpec* head = nullptr;
  for (const LayerSpec& l : layers_) {
    if (l.kind == LayerSpec::Kind::kConv) head = &l;
  }
  for (const LayerSpec& l : layers_) {
    if (l.kind != LayerSpec::Kind::kConv) continue;
    Tensor<T> weight({l.out, l.in, l.kernel, l.kernel});
    Tensor<T> bias({l.out});
    if (&l != head) {
      const double bound = std::sqrt(6.0 / (static_cast<double>(l.in) * l.kernel * l.kernel));
      for (auto& v : weight.data) v = static_cast<T>(rng.uniform(-bound, bound));
    }
    params_.push_back(std::move(weight));
    params_.push_back(std::move(bias));
    names_.push_back("conv" + std::to_string(conv_index) + ".weight");
    names_.push_back("conv" + std::to_string(conv_index) + ".bias");
    ++conv_index;
  }
  trainable_.assign(params_.size(), true);
}

template <typename T>
std::size_t Network<T>::num_parameters() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.numel();
  return n;
}

template <typename T>
void Network<T>::set_params(std::vector<Tensor<T>> params) {
  if (params.size() != params_.size()) {
    throw Error(ErrorKind::kShape, "set_params: expected " + std::to_string(params_.size()) +
                                       " tensors, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape != params_[i].shape) {
      throw Error(ErrorKind::kShape, "set_params: shape mismatch for " + names_[i]);
    }
  }
  params_ = std::move(params);
  ++version_;
}

template <typename T>
void Network<T>::set_trainable(std::size_t param_index, bool trainable) {
  trainable_.at(param_index) = trainable;
}

template <typename T>
typename Network<T>::Output Network<T>::forward(const Tensor<T>& input) const {
  if (input.shape.size() != 3 || input.channels() != cfg_.in_channels) {
    throw Error(ErrorKind::kShape, "forward: expected input {" +
                                       std::to_string(cfg_.in_channels) + ", H, W}");
  }
  const int f = cfg_.downsample_factor();
  if (input.height() % f != 0 || input.width() % f != 0 || input.height() < f ||
      input.width() < f) {
    throw Error(ErrorKind::kShape,
                "forward: input " + std::to_string(input.height()) + "x" +
                    std::to_string(input.width()) + " must be a multiple of " +
                    std::to_string(f) + " for arch " + to_string(cfg_.arch));
  }

  Output out;
  Cache& cache = out.cache;
  cache.owner = this;
  cache.version = version_;
  cache.acts.reserve(layers_.size() + 1);
  cache.acts.push_back(input);
  std::vector<std::size_t> saved(4, 0);
  for (const LayerSpec& l : layers_) {
    const Tensor<T>& x = cache.acts.back();
    Tensor<T> y;
    switch (l.kind) {
      case LayerSpec::Kind::kConv:
        conv_forward(x, params_[l.param], params_[l.param + 1], l.dilation, y);
        break;
      case LayerSpec::Kind::kRelu:
        y = x;
        for (auto& v : y.data) v = v > T(0) ? v : T(0);
        break;
      case LayerSpec::Kind::kPool:
        y = avg_pool2(x);
        break;
      case LayerSpec::Kind::kUp:
        y = upsample2(x);
        break;
      case LayerSpec::Kind::kSave:
        saved[l.slot] = cache.acts.size() - 1;
        y = x;
        break;
      case LayerSpec::Kind::kAdd: {
        y = x;
        const Tensor<T>& skip = cache.acts[saved[l.slot]];
        for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += skip.data[i];
        break;
      }
    }
    cache.acts.push_back(std::move(y));
  }
  out.logits = cache.acts.back();
  return out;
}

template <typename T>
std::vector<Tensor<T>> Network<T>::zero_gradients() const {
  std::vector<Tensor<T>> grads;
  grads.reserve(params_.size());
  for (const auto& p : params_) grads.emplace_back(p.shape);
  return grads;
}

template <typename T>
std::vector<Tensor<T>> Network<T>::backward(const Cache& cache,
                                            const Tensor<T>& grad_logits) const {
  if (cache.owner != this || cache.version != version_ ||
      cache.acts.size() != layers_.size() + 1) {
    throw Error(ErrorKind::kUsage,
                "backward: forward cache is stale or belongs to another network");
  }
  if (grad_logits.shape != cache.acts.back().shape) {
    throw Error(ErrorKind::kShape, "backward: upstream gradient shape differs from logits");
  }

  std::vector<Tensor<T>> grads = zero_gradients();
  std::vector<Tensor<T>> skip_grad(4);
  Tensor<T> g = grad_logits;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const LayerSpec& l = layers_[li];
    const Tensor<T>& x = cache.acts[li];
    const Tensor<T>& y = cache.acts[li + 1];
    switch (l.kind) {
      case LayerSpec::Kind::kConv: {
        Tensor<T>* gw = trainable_[l.param] ? &grads[l.param] : nullptr;
        Tensor<T>* gb = trainable_[l.param + 1] ? &grads[l.param + 1] : nullptr;
        g = conv_backward(x, params_[l.param], l.dilation, g, gw, gb, li != 0);
        break;
      }
      case LayerSpec::Kind::kRelu:
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          if (!(y.data[i] > T(0))) g.data[i] = T(0);
        }
        break;
      case LayerSpec::Kind::kPool:
        g = avg_pool2_backward(g);
        break;
      case LayerSpec::Kind::kUp:
        g = upsample2_backward(g);
        break;
      case LayerSpec::Kind::kAdd:
        skip_grad[l.slot] = g;
        break;
      case LayerSpec::Kind::kSave: {
        const Tensor<T>& s = skip_grad[l.slot];
        for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] += s.data[i];
        break;
      }
    }
  }
  return grads;
}

template class Network<float>;
template class Network<double>;

}  // namespace boxboost
