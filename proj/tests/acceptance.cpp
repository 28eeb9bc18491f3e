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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   acceptance [--work DIR] [--only 1,4,9]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boxboost/checkpoint.hpp"
#include "boxboost/evalbench.hpp"
#include "boxboost/ffs.hpp"
#include "boxboost/image_io.hpp"
#include "boxboost/losses.hpp"
#include "boxboost/manifest.hpp"
#include "boxboost/network.hpp"
#include "boxboost/pipeline.hpp"
#include "boxboost/synth.hpp"
#include "wavg_fixture.hpp"
#include "test_util.hpp"

namespace boxboost {
namespace {

using testing::central_difference;
using testing::random_mask;
using testing::random_prob;
using testing::relative_error;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runtime limits per criterion, in seconds.
constexpr double kLimit1 = 1.0;
constexpr double kLimit2 = 5.0;
constexpr double kLimit4 = 60.0;
constexpr double kLimit6 = 120.0;
constexpr double kLimit7 = 1800.0;

// --- 1: wAVG arithmetic -----------------------------------------------------

Outcome wavg_arithmetic(const fs::path&) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& row : fixture::kRows) {
    std::vector<DatasetReport> reports;
    for (std::size_t i = 0; i < fixture::kCounts.size(); ++i) {
      reports.push_back({std::string(fixture::kDatasets[i]),
                         static_cast<std::size_t>(fixture::kCounts[i]), row.dice[i], row.iou[i]});
    }
    const WeightedAverage w = weighted_average(reports);
    worst = std::max({worst, std::abs(w.dice - row.wavg_dice), std::abs(w.iou - row.wavg_iou)});
  }
  const double t = seconds_since(t0);
  return {worst <= fixture::kWavgTolerance + 1e-12 && t < kLimit1,
          "9 rows, max |wAVG - printed| " + fmt("%.5f", worst) + " (tol 0.001), " +
              fmt("%.3f", t) + " s"};
}

// --- 2: FFS set algebra -----------------------------------------------------

Outcome ffs_set_algebra(const fs::path&) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2002);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ImageSize size{rng.uniform_int(1, 32), rng.uniform_int(1, 32)};
    const BinaryMask b = random_mask(rng, size, rng.uniform(0.0, 1.0));
    const BinaryMask p = random_mask(rng, size, rng.uniform(0.0, 1.0));
    const TriLabelMask t = pixel_fusion(b, p);
    bool ok = t.size() == size;
    for (int y = 0; ok && y < size.height; ++y) {
      for (int x = 0; x < size.width; ++x) {
        const bool bb = b.at(y, x), pp = p.at(y, x);
        const Label want = bb && pp     ? Label::kForeground
                           : !bb && !pp ? Label::kBackground
                                        : Label::kUncertain;
        const Label got = t.at(y, x);
        const bool in_f = got == Label::kForeground, in_k = got == Label::kBackground,
                   in_u = got == Label::kUncertain;
        if (got != want || in_f + in_k + in_u != 1 || (in_f && !(bb && pp))) ok = false;
      }
    }
    ok = ok && t.count(Label::kForeground) + t.count(Label::kBackground) +
                       t.count(Label::kUncertain) ==
                   size.pixels();
    bad += !ok;
  }
  const double t = seconds_since(t0);
  return {bad == 0 && t < kLimit2,
          "1000 pairs up to 32x32, " + std::to_string(bad) + " violations, " + fmt("%.2f", t) + " s"};
}

// --- 3: object filter boundary ----------------------------------------------

Outcome filter_boundary(const fs::path&) {
  Rng rng(3003);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ImageSize size{rng.uniform_int(1, 32), rng.uniform_int(1, 32)};
    BinaryMask b = random_mask(rng, size, rng.uniform(0.0, 1.0));
    b.set(0, 0, true);
    const BinaryMask p = random_mask(rng, size, rng.uniform(0.0, 1.0));
    worst = std::max(worst, std::abs(object_filter(b, p).dice_score - testing::oracle_dice(b, p)));
  }

  // |b| = |p| = 100, 70 shared pixels: d = 0.7 exactly.
  BinaryMask b7({20, 20}), p7({20, 20});
  for (int i = 0; i < 100; ++i) b7.set(i / 20, i % 20, true);
  for (int i = 30; i < 130; ++i) p7.set(i / 20, i % 20, true);
  const FilterDecision at = object_filter(b7, p7);

  // d = 2k / n with 20k - 7n = 1, so d - 0.7 = 1 / (10 n); n = 1e8 + 17
  // gives d = 0.7 + 1e-9 up to 2e-16.
  const long n = 100000017;
  const long na = n / 2 + 1, nb = n - na, k = (7 * n + 1) / 20;
  const int side = 8100;
  BinaryMask big_b({side, side}), big_p({side, side});
  for (long i = 0; i < na; ++i) big_b.set(static_cast<int>(i / side), static_cast<int>(i % side), true);
  for (long i = na - k; i < na - k + nb; ++i) {
    big_p.set(static_cast<int>(i / side), static_cast<int>(i % side), true);
  }
  const FilterDecision above = object_filter(big_b, big_p);
  const double above_gap = above.dice_score - 0.7;

  const bool pass = worst <= 1e-12 && at.dice_score == 0.7 && !at.kept &&
                    std::abs(above_gap - 1e-9) < 1e-15 && above.kept;
  return {pass, "max |d - oracle| " + fmt("%.1e", worst) + "; d=0.7 kept=" +
                    (at.kept ? "yes" : "no") + "; d=0.7+" + fmt("%.3e", above_gap) +
                    " kept=" + (above.kept ? "yes" : "no")};
}

// --- 4: gradient correctness ------------------------------------------------

ProbMap with_value(const ProbMap& p, std::size_t i, double v) {
  std::vector<double> values(p.values().begin(), p.values().end());
  values[i] = v;
  return ProbMap(p.size(), std::move(values));
}

template <typename Loss>
double worst_prob_gradient(Rng& rng, Loss loss) {
  constexpr double h = 1e-4;
  double worst = 0.0;
  for (int point = 0; point < 100; ++point) {
    const ImageSize size{rng.uniform_int(2, 6), rng.uniform_int(2, 6)};
    const ProbMap p = random_prob(rng, size, 0.05, 0.95);
    const BinaryMask t = random_mask(rng, size, 0.5);
    BinaryMask region = random_mask(rng, size, 0.6);
    const std::size_t i = rng.below(size.pixels());
    region.set(static_cast<int>(i) / size.width, static_cast<int>(i) % size.width, true);
    const double analytic = loss(p, t, region).gradients[0].values()[i];
    const double x = p.values()[i];
    const double numeric =
        (loss(with_value(p, i, x + h), t, region).value - loss(with_value(p, i, x - h), t, region).value) /
        (2 * h);
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  return worst;
}

double worst_ic_gradient(Rng& rng) {
  double worst = 0.0;
  for (int point = 0; point < 100; ++point) {
    const ImageSize size{rng.uniform_int(2, 5), rng.uniform_int(2, 5)};
    const int c = rng.uniform_int(1, 3);
    std::vector<double> a(c * size.pixels()), b(a.size());
    for (double& v : a) v = rng.uniform(-2, 2);
    for (double& v : b) v = rng.uniform(-2, 2);
    BinaryMask u = random_mask(rng, size, 0.5);
    const std::size_t i = rng.below(a.size());
    const std::size_t pixel = i % size.pixels();
    u.set(static_cast<int>(pixel) / size.width, static_cast<int>(pixel) % size.width, true);
    const int which = static_cast<int>(rng.below(2));
    FeatureMap fr(c, size, a), fp(c, size, b);
    const double analytic = ic_loss(fr, fp, u).gradients[which].values()[i];
    double& slot = (which == 0 ? fr : fp).values()[i];
    const double numeric = central_difference([&] { return ic_loss(fr, fp, u).value; }, slot, 1e-4);
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  return worst;
}

ProbMap sigmoid_map(const Tensor<double>& logits) {
  std::vector<double> v(logits.data.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = sigmoid(logits.data[i]);
  return ProbMap({logits.height(), logits.width()}, std::move(v));
}

FeatureMap as_feature(const Tensor<double>& logits) {
  return FeatureMap(1, {logits.height(), logits.width()}, logits.data);
}

// total_loss over both networks, differentiated w.r.t. 25 sampled parameters
// of each. Returns {worst A, worst B}.
std::pair<double, double> worst_network_gradient(Rng& rng) {
  Network<double> net_r(NetworkConfig::arch_a(1));
  Network<double> net_p(NetworkConfig::arch_b(2));
  for (Network<double>* net : {&net_r, &net_p}) {
    for (Tensor<double>& p : net->mutable_params()) {
      for (double& v : p.data) v = rng.uniform(-0.25, 0.25);
    }
  }
  const int n = 16;
  Tensor<double> x({1, n, n});
  for (double& v : x.data) v = rng.uniform(-1.5, 1.5);
  std::vector<Label> labels(n * n);
  for (Label& l : labels) l = static_cast<Label>(rng.below(3));
  const TriLabelMask pseudo({n, n}, labels);

  auto loss_value = [&] {
    const auto lr = net_r.forward(x).logits;
    const auto lp = net_p.forward(x).logits;
    return total_loss(sigmoid_map(lr), sigmoid_map(lp), as_feature(lr), as_feature(lp), pseudo).value;
  };
  const auto out_r = net_r.forward(x);
  const auto out_p = net_p.forward(x);
  const ProbMap pr = sigmoid_map(out_r.logits), pp = sigmoid_map(out_p.logits);
  const TotalLossResult loss = total_loss(pr, pp, as_feature(out_r.logits), as_feature(out_p.logits), pseudo);
  auto upstream = [](const ProbMap& p, const FeatureMap& gp, const FeatureMap& gf) {
    Tensor<double> g({1, p.size().height, p.size().width});
    for (std::size_t i = 0; i < g.data.size(); ++i) {
      const double q = p.values()[i];
      g.data[i] = gp.values()[i] * q * (1.0 - q) + gf.values()[i];
    }
    return g;
  };
  const auto grads_r = net_r.backward(out_r.cache, upstream(pr, loss.grad_pred_r, loss.grad_f_r));
  const auto grads_p = net_p.backward(out_p.cache, upstream(pp, loss.grad_pred_p, loss.grad_f_p));

  double worst[2] = {0.0, 0.0};
  int slot_index = 0;
  for (auto [net, grads] : {std::pair{&net_r, &grads_r}, std::pair{&net_p, &grads_p}}) {
    for (int k = 0; k < 25; ++k) {
      const std::size_t t = rng.below(net->params().size());
      const std::size_t i = rng.below(net->params()[t].numel());
      const double analytic = (*grads)[t].data[i];
      double& slot = net->mutable_params()[t].data[i];
      const double numeric = central_difference(loss_value, slot, 1e-6);
      worst[slot_index] = std::max(worst[slot_index], relative_error(analytic, numeric, 1e-7));
    }
    ++slot_index;
  }
  return {worst[0], worst[1]};
}

Outcome gradient_correctness(const fs::path&) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(4004);
  const double bce = worst_prob_gradient(rng, [](const ProbMap& p, const BinaryMask& t, const BinaryMask& r) {
    return bce_loss(p, t, r);
  });
  const double dice = worst_prob_gradient(rng, [](const ProbMap& p, const BinaryMask& t, const BinaryMask& r) {
    return dice_loss(p, t, r);
  });
  const double ic = worst_ic_gradient(rng);
  const auto [net_a, net_b] = worst_network_gradient(rng);
  const double t = seconds_since(t0);
  const bool pass = bce < 1e-4 && dice < 1e-4 && ic < 1e-4 && net_a < 1e-3 && net_b < 1e-3 && t < kLimit4;
  return {pass, "max rel err BCE " + fmt("%.1e", bce) + ", Dice " + fmt("%.1e", dice) + ", IC " +
                    fmt("%.1e", ic) + " (tol 1e-4); network A " + fmt("%.1e", net_a) + ", B " +
                    fmt("%.1e", net_b) + " (tol 1e-3); " + fmt("%.1f", t) + " s"};
}

// --- 5: IC loss fixture -----------------------------------------------------

Outcome ic_fixture(const fs::path&) {
  const double ten = ic_loss(FeatureMap(1, {2, 2}, {1, 2, 3, 4}), FeatureMap(1, {2, 2}, {1, 0, 3, 0}),
                             BinaryMask({2, 2}, {0, 1, 0, 1}))
                         .value;

  const LossResult empty =
      ic_loss(FeatureMap(2, {2, 2}, {1, 2, 3, 4, 5, 6, 7, 8}), FeatureMap(2, {2, 2}, 0.0), BinaryMask({2, 2}));
  bool zero_grads = empty.value == 0.0;
  for (const FeatureMap& g : empty.gradients) {
    for (double v : g.values()) zero_grads = zero_grads && v == 0.0;
  }

  Rng rng(5005);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const ImageSize size{rng.uniform_int(1, 8), rng.uniform_int(1, 8)};
    const int c = rng.uniform_int(1, 3);
    std::vector<double> a(c * size.pixels()), b(a.size());
    for (double& v : a) v = rng.uniform(-3, 3);
    for (double& v : b) v = rng.uniform(-3, 3);
    const FeatureMap fr(c, size, a), fp(c, size, b);
    const BinaryMask u = random_mask(rng, size, 0.5);
    const LossResult x = ic_loss(fr, fp, u), y = ic_loss(fp, fr, u);
    worst = std::max(worst, std::abs(x.value - y.value));
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst = std::max(worst, std::abs(x.gradients[0].values()[i] + x.gradients[1].values()[i]));
      worst = std::max(worst, std::abs(x.gradients[0].values()[i] - y.gradients[1].values()[i]));
    }
  }
  return {ten == 10.0 && zero_grads && worst <= 1e-12,
          "worked example " + fmt("%.17g", ten) + "; empty U zero value+gradients " +
              (zero_grads ? "yes" : "no") + "; symmetry max dev " + fmt("%.1e", worst)};
}

// --- 6: noise rejection -----------------------------------------------------

Outcome noise_rejection(const fs::path&) {
  const auto t0 = std::chrono::steady_clock::now();
  CorpusSpec spec;
  spec.train_mask = 0;
  spec.train_box = 400;
  spec.test = 0;
  spec.noise.wrong_label = 0.25;
  spec.seed = 6006;
  int wrong = 0, wrong_rejected = 0, clean = 0, clean_kept = 0;
  // The hidden ground truth stands in for a perfect predictor.
  for (const SyntheticSample& s : synthesize(spec).samples) {
    const bool kept = object_filter(rasterize_boxes(s.record.boxes, spec.size), s.ground_truth).kept;
    if (s.record.noise == NoiseMode::kWrongLabel) {
      ++wrong;
      wrong_rejected += !kept;
    } else if (s.record.noise == NoiseMode::kClean) {
      ++clean;
      clean_kept += kept;
    }
  }
  const double rej = wrong ? static_cast<double>(wrong_rejected) / wrong : 0.0;
  const double keep = clean ? static_cast<double>(clean_kept) / clean : 0.0;
  const double t = seconds_since(t0);
  return {wrong == 100 && rej >= 0.90 && keep >= 0.80 && t < kLimit6,
          "wrong-label rejected " + std::to_string(wrong_rejected) + "/" + std::to_string(wrong) +
              " (" + fmt("%.3f", rej) + " >= 0.90); clean kept " + std::to_string(clean_kept) + "/" +
              std::to_string(clean) + " (" + fmt("%.3f", keep) + " >= 0.80); " + fmt("%.1f", t) + " s"};
}

// --- 7: ablation direction --------------------------------------------------

PipelineConfig reference_config() {
  PipelineConfig cfg;
  cfg.corpus.size = {64, 64};
  cfg.corpus.train_mask = 60;
  cfg.corpus.train_box = 400;
  cfg.corpus.test = 100;
  cfg.corpus.noise = {0.1, 0.1, 0.1, 0.1};
  cfg.corpus.seed = 2026;
  cfg.seeds = {1, 2, 3};
  return cfg;
}

Outcome ablation_direction(const fs::path& work) {
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineConfig cfg = reference_config();
  const fs::path dir = work / "ablation";
  fs::remove_all(dir);
  synth_stage(cfg.corpus, dir / "corpus");
  const AblationTable table = run_ablation(cfg, dir / "corpus" / "manifest.jsonl", dir);
  const double t = seconds_since(t0);

  bool pass = t < kLimit7;
  std::string detail;
  for (Arch a : {Arch::kA, Arch::kB}) {
    const double base = table.mean(Setting::kBaseline, a).dice;
    const double ffs = table.mean(Setting::kFfs, a).dice;
    const double ic = table.mean(Setting::kFfsIc, a).dice;
    pass = pass && base < ffs && ffs < ic && ffs - base >= 0.02;
    detail += std::string(to_string(a)) + ": " + fmt("%.4f", base) + " -> " + fmt("%.4f", ffs) + " -> " +
              fmt("%.4f", ic) + " (gain " + fmt("%+.4f", ffs - base) + ", need >= 0.02); ";
  }
  return {pass, detail + fmt("%.0f", t) + " s (limit 1800)"};
}

// --- 8: determinism ---------------------------------------------------------

bool deterministic_artifact(const fs::path& rel) {
  const std::string ext = rel.extension().string();
  if (ext == ".ckpt" || ext == ".csv") return true;
  for (const auto& part : rel) {
    if (part == "pseudo") return ext == ".pgm";
  }
  return false;
}

Outcome determinism(const fs::path& work) {
  PipelineConfig cfg;
  cfg.corpus.size = {32, 32};
  cfg.corpus.train_mask = 12;
  cfg.corpus.train_box = 24;
  cfg.corpus.test = 8;
  cfg.corpus.noise = {0.1, 0.1, 0.1, 0.1};
  cfg.corpus.seed = 8008;
  cfg.train.epochs = 3;
  cfg.train.steps_per_epoch = 20;
  cfg.train.batch = 4;
  cfg.train.adamw.lr = 1e-2;
  cfg.ffs.dice_threshold = 0.3;
  cfg.seed = 8;

  const fs::path dir = work / "determinism";
  fs::remove_all(dir);
  for (const char* run : {"run1", "run2"}) {
    synth_stage(cfg.corpus, dir / run / "corpus");
    run_pipeline(cfg, dir / run / "corpus" / "manifest.jsonl", dir / run / "out");
  }
  std::set<fs::path> files1, files2;
  for (const auto& [root, files] : {std::pair{dir / "run1" / "out", &files1}, std::pair{dir / "run2" / "out", &files2}}) {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (!e.is_regular_file()) continue;
      const fs::path rel = fs::relative(e.path(), root);
      if (deterministic_artifact(rel)) files->insert(rel);
    }
  }
  int ckpt = 0, pseudo = 0, csv = 0, differ = 0;
  for (const fs::path& rel : files1) {
    if (!files2.count(rel) ||
        read_file(dir / "run1" / "out" / rel) != read_file(dir / "run2" / "out" / rel)) {
      ++differ;
    }
    const std::string ext = rel.extension().string();
    ckpt += ext == ".ckpt";
    csv += ext == ".csv";
    pseudo += ext == ".pgm";
  }
  differ += static_cast<int>(files2.size()) - static_cast<int>(files1.size());
  return {differ == 0 && ckpt > 0 && pseudo > 0 && csv > 0,
          std::to_string(ckpt) + " checkpoints, " + std::to_string(pseudo) + " pseudo labels, " +
              std::to_string(csv) + " CSVs compared; " + std::to_string(differ) + " differ"};
}

// --- 9: IO round-trips ------------------------------------------------------

bool write_read_write(const fs::path& a, const fs::path& b, const std::function<void(const fs::path&)>& write,
                      const std::function<void(const fs::path&, const fs::path&)>& reread) {
  write(a);
  reread(a, b);
  return read_file(a) == read_file(b);
}

Outcome io_round_trips(const fs::path& work) {
  const fs::path dir = work / "io";
  fs::remove_all(dir);
  Rng rng(9009);
  int fails[4] = {0, 0, 0, 0};
  for (int trial = 0; trial < 50; ++trial) {
    const ImageSize size = testing::random_size(rng, 40);

    const BinaryMask mask = random_mask(rng, size, rng.uniform01());
    fails[0] += !write_read_write(
        dir / "m1.pgm", dir / "m2.pgm", [&](const fs::path& p) { write_mask(p, mask); },
        [](const fs::path& a, const fs::path& b) { write_mask(b, read_mask(a)); });

    std::vector<Label> labels(size.pixels());
    for (Label& l : labels) l = static_cast<Label>(rng.below(3));
    const TriLabelMask tri(size, labels);
    fails[1] += !write_read_write(
        dir / "t1.pgm", dir / "t2.pgm", [&](const fs::path& p) { write_tri_label(p, tri); },
        [](const fs::path& a, const fs::path& b) { write_tri_label(b, read_tri_label(a)); });

    CorpusSpec spec;
    spec.size = {rng.uniform_int(32, 48), rng.uniform_int(32, 48)};
    spec.train_mask = rng.uniform_int(0, 3);
    spec.train_box = rng.uniform_int(2, 6);
    spec.test = rng.uniform_int(0, 2);
    spec.noise = {0.2, 0.0, 0.2, 0.2};
    spec.seed = rng.next();
    std::vector<ManifestRecord> records;
    for (const SyntheticSample& s : synthesize(spec).samples) records.push_back(s.record);
    fails[2] += !write_read_write(
        dir / "a.jsonl", dir / "b.jsonl", [&](const fs::path& p) { save_manifest(p, records); },
        [](const fs::path& a, const fs::path& b) { save_manifest(b, parse_manifest(read_file(a))); });

    Network<float> net(network_for(rng.below(2) ? Arch::kA : Arch::kB, rng.next()));
    for (Tensor<float>& p : net.mutable_params()) {
      for (float& v : p.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    }
    net.set_step(rng.below(100000));
    fails[3] += !write_read_write(
        dir / "a.ckpt", dir / "b.ckpt", [&](const fs::path& p) { save_checkpoint(p, net); },
        [](const fs::path& a, const fs::path& b) { save_checkpoint(b, load_checkpoint(a)); });
  }
  return {fails[0] + fails[1] + fails[2] + fails[3] == 0,
          "50 fixtures each; mismatches: masks " + std::to_string(fails[0]) + ", tri-labels " +
              std::to_string(fails[1]) + ", manifests " + std::to_string(fails[2]) + ", checkpoints " +
              std::to_string(fails[3])};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(const fs::path&)> run;
};

}  // namespace
}  // namespace boxboost

int main(int argc, char** argv) {
  using namespace boxboost;
  CLI::App app{"Acceptance criteria 1-9"};
  std::string work = (fs::temp_directory_path() / "boxboost_acceptance").string();
  std::vector<int> only;
  app.add_option("--work", work, "Scratch directory")->capture_default_str();
  app.add_option("--only", only, "Comma-separated criterion ids")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "wAVG arithmetic", wavg_arithmetic},
      {2, "FFS set algebra", ffs_set_algebra},
      {3, "object filter boundary", filter_boundary},
      {4, "gradient correctness", gradient_correctness},
      {5, "IC loss fixture", ic_fixture},
      {6, "noise rejection", noise_rejection},
      {7, "ablation direction", ablation_direction},
      {8, "determinism", determinism},
      {9, "IO round-trips", io_round_trips},
  };
  fs::create_directories(work);
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.run(work);
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %d %-24s %s  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
