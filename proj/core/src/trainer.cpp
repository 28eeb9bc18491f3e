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

#include "boxboost/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "boxboost/augment.hpp"
#include "boxboost/error.hpp"
#include "boxboost/losses.hpp"
#include "boxboost/parallel.hpp"
#include "boxboost/random.hpp"

namespace boxboost {

namespace {

constexpr std::uint64_t kMaskStream = 1;
constexpr std::uint64_t kBoxStream = 2;
constexpr std::uint64_t kAugmentStream = 3;

// Endless shuffled pass over [0, n), reshuffled on every wrap.
class IndexStream {
 public:
  IndexStream(std::size_t n, std::uint64_t seed) : n_(n), seed_(seed) {}

  std::size_t next() {
    if (pos_ == order_.size()) refill();
    return order_[pos_++];
  }

 private:
  void refill() {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    Rng rng(Rng::derive(seed_, pass_++));
    rng.shuffle(order_);
    pos_ = 0;
  }

  std::size_t n_;
  std::uint64_t seed_;
  std::uint64_t pass_ = 0;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

struct BatchSlot {
  const TrainSample* sample;
  std::uint64_t augment_seed;
};

class BatchSampler {
 public:
  BatchSampler(std::span<const TrainSample> mask, std::span<const TrainSample> box,
               const TrainConfig& cfg)
      : mask_(mask),
        box_(box),
        cfg_(cfg),
        mask_stream_(mask.size(), Rng::derive(cfg.seed, kMaskStream)),
        box_stream_(box.size(), Rng::derive(cfg.seed, kBoxStream)) {}

  std::vector<BatchSlot> next(std::uint64_t step) {
    int from_mask = cfg_.batch;
    if (mask_.empty()) {
      from_mask = 0;
    } else if (!box_.empty()) {
      from_mask = cfg_.batch / 2;
    }
    std::vector<BatchSlot> slots;
    for (int i = 0; i < cfg_.batch; ++i) {
      const TrainSample* s = i < from_mask ? &mask_[mask_stream_.next()] : &box_[box_stream_.next()];
      const std::uint64_t aug =
          Rng::derive(cfg_.seed, (kAugmentStream << 48) + step * cfg_.batch + i);
      slots.push_back({s, aug});
    }
    return slots;
  }

 private:
  std::span<const TrainSample> mask_;
  std::span<const TrainSample> box_;
  const TrainConfig& cfg_;
  IndexStream mask_stream_;
  IndexStream box_stream_;
};

int size_multiple(const Network<float>& a, const Network<float>* b) {
  int m = a.config().downsample_factor();
  if (b) m = std::lcm(m, b->config().downsample_factor());
  return m;
}

std::pair<Tensor<float>, TriLabelMask> prepare(const BatchSlot& slot, const TrainConfig& cfg,
                                               int multiple) {
  if (!cfg.augment) return {slot.sample->image, slot.sample->labels};
  return augment(slot.sample->image, slot.sample->labels, slot.augment_seed, multiple);
}

struct Head {
  ProbMap prob;
  FeatureMap logits;
};

Head head_of(const Tensor<float>& logits) {
  const ImageSize size{logits.height(), logits.width()};
  std::vector<double> z(logits.data.begin(), logits.data.end());
  std::vector<double> p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i])) throw Error(ErrorKind::kNumerical, "non-finite network output");
    p[i] = sigmoid(z[i]);
  }
  return {ProbMap(size, std::move(p)), FeatureMap(1, size, std::move(z))};
}

// d(loss)/d(logit) from gradients w.r.t. the probability and the logit itself.
Tensor<float> logit_gradient(const Head& head, const FeatureMap& grad_prob,
                             const FeatureMap* grad_logit, double scale) {
  const ImageSize size = head.prob.size();
  Tensor<float> g({1, size.height, size.width});
  const auto p = head.prob.values();
  const auto gp = grad_prob.values();
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    double v = gp[i] * p[i] * (1.0 - p[i]);
    if (grad_logit) v += grad_logit->values()[i];
    g.data[i] = static_cast<float>(v * scale);
  }
  return g;
}

void accumulate(std::vector<Tensor<float>>& into, const std::vector<Tensor<float>>& from) {
  for (std::size_t t = 0; t < into.size(); ++t) {
    for (std::size_t i = 0; i < into[t].data.size(); ++i) into[t].data[i] += from[t].data[i];
  }
}

void check_finite(const TrainLogRow& row) {
  if (!std::isfinite(row.loss)) {
    throw Error(ErrorKind::kNumerical,
                "non-finite training loss at step " + std::to_string(row.step));
  }
}

void check_inputs(std::span<const TrainSample> mask, std::span<const TrainSample> box,
                  const TrainConfig& cfg, int steps_per_epoch) {
  cfg.validate();
  if (mask.empty() && box.empty()) throw Error(ErrorKind::kConfig, "no training items");
  if (steps_per_epoch < 1) throw Error(ErrorKind::kConfig, "steps per epoch must be >= 1");
  for (auto items : {mask, box}) {
    for (const TrainSample& s : items) {
      if (s.image.shape.size() != 3 || s.image.height() != s.labels.size().height ||
          s.image.width() != s.labels.size().width) {
        throw Error(ErrorKind::kShape, "training item '" + s.id + "' image/label size mismatch");
      }
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0) throw Error(ErrorKind::kConfig, "epochs must be >= 0");
  if (batch < 1) throw Error(ErrorKind::kConfig, "batch must be >= 1");
  if (steps_per_epoch < 0) throw Error(ErrorKind::kConfig, "steps_per_epoch must be >= 0");
  try {
    adamw.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
}

int resolve_steps_per_epoch(const TrainConfig& cfg, std::size_t mask_items,
                            std::size_t box_split_size) {
  if (cfg.steps_per_epoch > 0) return cfg.steps_per_epoch;
  if (box_split_size > 0) {
    const std::size_t per_step = cfg.batch - (mask_items > 0 ? cfg.batch / 2 : 0);
    return static_cast<int>((box_split_size + per_step - 1) / std::max<std::size_t>(per_step, 1));
  }
  return static_cast<int>(std::max<std::size_t>(1, (mask_items + cfg.batch - 1) / cfg.batch));
}

Tensor<float> to_tensor(const GrayImage& image) {
  Tensor<float> t({1, image.size.height, image.size.width});
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    t.data[i] = (static_cast<float>(image.pixels[i]) - 128.0f) / 64.0f;
  }
  return t;
}

std::string train_log_csv(std::span<const TrainLogRow> rows) {
  std::string out = "step,loss,bce_r,dice_r,bce_p,dice_p,ic\n";
  char buf[256];
  for (const TrainLogRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%llu,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f\n",
                  static_cast<unsigned long long>(r.step), r.loss, r.bce_r, r.dice_r, r.bce_p,
                  r.dice_p, r.ic);
    out += buf;
  }
  return out;
}

ProbMap predict(const Network<float>& net, const Tensor<float>& image) {
  return head_of(net.forward(image).logits).prob;
}

std::vector<TrainLogRow> train_single(Network<float>& net, std::span<const TrainSample> mask_items,
                                      std::span<const TrainSample> box_items,
                                      const TrainConfig& cfg, int steps_per_epoch,
                                      const TrainObserver& observer) {
  check_inputs(mask_items, box_items, cfg, steps_per_epoch);
  const int multiple = size_multiple(net, nullptr);
  const std::uint64_t total = static_cast<std::uint64_t>(cfg.epochs) * steps_per_epoch;
  BatchSampler sampler(mask_items, box_items, cfg);
  AdamWState<float> opt;
  std::vector<TrainLogRow> log;

  struct ItemOut {
    std::vector<Tensor<float>> grads;
    double bce = 0.0, dice = 0.0;
  };
  for (std::uint64_t step = 0; step < total; ++step) {
    const std::vector<BatchSlot> slots = sampler.next(step);
    std::vector<ItemOut> outs(slots.size());
    const double scale = 1.0 / static_cast<double>(slots.size());
    parallel_for(slots.size(), cfg.workers, [&](std::size_t i) {
      auto [image, labels] = prepare(slots[i], cfg, multiple);
      auto fwd = net.forward(image);
      const Head head = head_of(fwd.logits);
      const BinaryMask target = labels.region(Label::kForeground);
      const BinaryMask certain = unite(target, labels.region(Label::kBackground));
      const LossResult bce = bce_loss(head.prob, target, certain);
      const LossResult dl = dice_loss(head.prob, target, certain);
      FeatureMap g = bce.gradients[0];
      for (std::size_t k = 0; k < g.numel(); ++k) g.values()[k] += dl.gradients[0].values()[k];
      outs[i].grads = net.backward(fwd.cache, logit_gradient(head, g, nullptr, scale));
      outs[i].bce = bce.value;
      outs[i].dice = dl.value;
    });
    std::vector<Tensor<float>> grads = net.zero_gradients();
    TrainLogRow row;
    row.step = step + 1;
    for (const ItemOut& o : outs) {
      accumulate(grads, o.grads);
      row.bce_r += o.bce * scale;
      row.dice_r += o.dice * scale;
    }
    row.loss = row.bce_r + row.dice_r;
    check_finite(row);
    adamw_step(net, grads, cfg.adamw, opt);
    log.push_back(row);
    if (observer) observer(row);
  }
  return log;
}

std::vector<TrainLogRow> train_dual(Network<float>& net_r, Network<float>& net_p,
                                    std::span<const TrainSample> mask_items,
                                    std::span<const TrainSample> box_items,
                                    const TrainConfig& cfg, int steps_per_epoch,
                                    bool consistency, const TrainObserver& observer) {
  check_inputs(mask_items, box_items, cfg, steps_per_epoch);
  if (&net_r == &net_p) throw Error(ErrorKind::kUsage, "dual training needs two networks");
  const int multiple = size_multiple(net_r, &net_p);
  const std::uint64_t total = static_cast<std::uint64_t>(cfg.epochs) * steps_per_epoch;
  BatchSampler sampler(mask_items, box_items, cfg);
  AdamWState<float> opt_r, opt_p;
  std::vector<TrainLogRow> log;

  struct ItemOut {
    std::vector<Tensor<float>> grads_r, grads_p;
    TotalLossTerms terms;
  };
  for (std::uint64_t step = 0; step < total; ++step) {
    const std::vector<BatchSlot> slots = sampler.next(step);
    std::vector<ItemOut> outs(slots.size());
    const double scale = 1.0 / static_cast<double>(slots.size());
    parallel_for(slots.size(), cfg.workers, [&](std::size_t i) {
      auto [image, labels] = prepare(slots[i], cfg, multiple);
      auto fwd_r = net_r.forward(image);
      auto fwd_p = net_p.forward(image);
      const Head hr = head_of(fwd_r.logits);
      const Head hp = head_of(fwd_p.logits);
      TotalLossOptions opts;
      opts.consistency = consistency;
      const TotalLossResult loss = total_loss(hr.prob, hp.prob, hr.logits, hp.logits, labels, opts);
      const FeatureMap* gfr = consistency ? &loss.grad_f_r : nullptr;
      const FeatureMap* gfp = consistency ? &loss.grad_f_p : nullptr;
      outs[i].grads_r =
          net_r.backward(fwd_r.cache, logit_gradient(hr, loss.grad_pred_r, gfr, scale));
      outs[i].grads_p =
          net_p.backward(fwd_p.cache, logit_gradient(hp, loss.grad_pred_p, gfp, scale));
      outs[i].terms = loss.terms;
    });
    std::vector<Tensor<float>> grads_r = net_r.zero_gradients();
    std::vector<Tensor<float>> grads_p = net_p.zero_gradients();
    TrainLogRow row;
    row.step = step + 1;
    for (const ItemOut& o : outs) {
      accumulate(grads_r, o.grads_r);
      accumulate(grads_p, o.grads_p);
      row.bce_r += o.terms.bce_r * scale;
      row.dice_r += o.terms.dice_r * scale;
      row.bce_p += o.terms.bce_p * scale;
      row.dice_p += o.terms.dice_p * scale;
      row.ic += o.terms.ic * scale;
    }
    row.loss = row.bce_r + row.dice_r + row.bce_p + row.dice_p + row.ic;
    check_finite(row);
    adamw_step(net_r, grads_r, cfg.adamw, opt_r);
    adamw_step(net_p, grads_p, cfg.adamw, opt_p);
    log.push_back(row);
    if (observer) observer(row);
  }
  return log;
}

}  // namespace boxboost
