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

#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "boxboost/checkpoint.hpp"
#include "boxboost/error.hpp"
#include "boxboost/evalbench.hpp"
#include "boxboost/image_io.hpp"
#include "boxboost/parallel.hpp"
#include "boxboost/pipeline.hpp"

namespace boxboost::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Raw flag values; unset optionals leave the config-file value in place.
struct Flags {
  std::string config_path;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  // corpus
  std::optional<int> height, width, train_mask, train_box, test;
  std::optional<double> blur, no_polyp, wrong_label, imprecise_box;

  // training
  std::optional<int> epochs, batch, steps_per_epoch;
  std::optional<double> lr, weight_decay, beta1, beta2, adam_eps;
  bool no_augment = false;

  // ffs
  std::optional<double> dice_threshold, binarize_threshold;

  // boost / ablation
  bool no_ic = false;
  bool warm_start = false;
  std::optional<int> rounds;
  std::optional<std::string> predictor;
  std::vector<std::uint64_t> seeds;

  // eval
  std::optional<double> threshold;
  int points = 256;

  // paths and per-command arguments
  std::string out, manifest, checkpoint, predictions, ffs_dir, warm_r, warm_p;
  std::string arch = "A";
  std::string split = "train_box";
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path,
                  "JSON config (run-summary \"config\" schema); explicit flags override it");
  cmd->add_option("--workers", f.workers, "Worker threads, 0 = all cores")->default_str("0");
  cmd->add_option("--seed", f.seed, "Global seed (falls back to $BOXBOOST_SEED)")
      ->default_str("0");
  cmd->add_flag("--quiet", f.quiet, "Suppress progress lines");
}

void add_train(CLI::App* cmd, Flags& f) {
  const PipelineConfig d;
  cmd->add_option("--epochs", f.epochs, "Training epochs")->default_str(std::to_string(d.train.epochs));
  cmd->add_option("--batch", f.batch, "Batch size")->default_str(std::to_string(d.train.batch));
  cmd->add_option("--steps-per-epoch", f.steps_per_epoch,
                  "Optimizer steps per epoch, 0 = one pass over the box split at 1:1 mixing")
      ->default_str("0");
  cmd->add_option("--lr", f.lr, "AdamW learning rate")->default_str(num(d.train.adamw.lr));
  cmd->add_option("--weight-decay", f.weight_decay, "AdamW decoupled weight decay")
      ->default_str(num(d.train.adamw.weight_decay));
  cmd->add_option("--beta1", f.beta1, "AdamW beta1")->default_str(num(d.train.adamw.beta1));
  cmd->add_option("--beta2", f.beta2, "AdamW beta2")->default_str(num(d.train.adamw.beta2));
  cmd->add_option("--adam-eps", f.adam_eps, "AdamW epsilon")->default_str(num(d.train.adamw.eps));
  cmd->add_flag("--no-augment", f.no_augment, "Disable flips, rotations and rescaling");
}

void add_ffs(CLI::App* cmd, Flags& f) {
  const FfsConfig d;
  cmd->add_option("--dice-threshold", f.dice_threshold, "Keep a frame iff dice(B,P) > this")
      ->default_str(num(d.dice_threshold));
  cmd->add_option("--binarize-threshold", f.binarize_threshold,
                  "Prediction is foreground iff p > this")
      ->default_str(num(d.binarize_threshold));
}

void add_eval_threshold(CLI::App* cmd, Flags& f) {
  cmd->add_option("--threshold", f.threshold, "Binarization threshold for Dice/IoU")
      ->default_str("0.5");
}

std::uint64_t env_seed() {
  const char* v = std::getenv("BOXBOOST_SEED");
  if (!v) return 0;
  char* end = nullptr;
  errno = 0;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (*v == '\0' || *end != '\0' || errno != 0 || *v == '-') {
    throw Error(ErrorKind::kConfig, std::string("BOXBOOST_SEED is not an unsigned integer: '") + v + "'");
  }
  return s;
}

template <typename T, typename U>
void apply(const std::optional<T>& flag, U& target) {
  if (flag) target = static_cast<U>(*flag);
}

PipelineConfig resolve(const Flags& f, bool corpus_seed) {
  PipelineConfig cfg;
  if (!f.config_path.empty()) {
    const std::string text = read_file(f.config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::kConfig, f.config_path + ": " + e.what());
    }
    // A full run summary is accepted as well as a bare config object.
    if (j.is_object() && j.contains("config") && j.contains("stages")) j = j.at("config");
    cfg = pipeline_config_from_json(j, cfg);
  }
  std::optional<std::uint64_t> seed = f.seed;
  if (!seed && std::getenv("BOXBOOST_SEED")) seed = env_seed();
  if (seed) (corpus_seed ? cfg.corpus.seed : cfg.seed) = *seed;
  apply(f.workers, cfg.workers);
  apply(f.height, cfg.corpus.size.height);
  apply(f.width, cfg.corpus.size.width);
  apply(f.train_mask, cfg.corpus.train_mask);
  apply(f.train_box, cfg.corpus.train_box);
  apply(f.test, cfg.corpus.test);
  apply(f.blur, cfg.corpus.noise.blur);
  apply(f.no_polyp, cfg.corpus.noise.no_polyp);
  apply(f.wrong_label, cfg.corpus.noise.wrong_label);
  apply(f.imprecise_box, cfg.corpus.noise.imprecise_box);
  apply(f.epochs, cfg.train.epochs);
  apply(f.batch, cfg.train.batch);
  apply(f.steps_per_epoch, cfg.train.steps_per_epoch);
  apply(f.lr, cfg.train.adamw.lr);
  apply(f.weight_decay, cfg.train.adamw.weight_decay);
  apply(f.beta1, cfg.train.adamw.beta1);
  apply(f.beta2, cfg.train.adamw.beta2);
  apply(f.adam_eps, cfg.train.adamw.eps);
  if (f.no_augment) cfg.train.augment = false;
  apply(f.dice_threshold, cfg.ffs.dice_threshold);
  apply(f.binarize_threshold, cfg.ffs.binarize_threshold);
  if (f.no_ic) cfg.consistency = false;
  if (f.warm_start) cfg.warm_start = true;
  apply(f.rounds, cfg.rounds);
  if (f.predictor) {
    try {
      cfg.predictor = arch_from_string(*f.predictor);
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, e.what());
    }
  }
  if (!f.seeds.empty()) cfg.seeds = f.seeds;
  apply(f.threshold, cfg.eval_threshold);
  cfg.validate();
  return cfg;
}

void print_resolved(std::ostream& out, const std::string& command, const PipelineConfig& cfg,
                    const ordered_json& args) {
  ordered_json j;
  j["command"] = command;
  j["config"] = to_json(cfg);
  j["args"] = args;
  out << j.dump() << "\n";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return kExitUsage;
    case ErrorKind::kConfig:
    case ErrorKind::kParameter: return kExitConfig;
    case ErrorKind::kNumerical: return kExitNumerical;
    case ErrorKind::kShape:
    case ErrorKind::kInvalidAnnotation:
    case ErrorKind::kParse:
    case ErrorKind::kIo:
    case ErrorKind::kEmptyPseudoSet: return kExitData;
  }
  return kExitData;
}

int report_error(std::ostream& err, const std::string& kind, const std::string& message,
                 int code, std::optional<std::size_t> offset = std::nullopt) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  if (offset) j["byte_offset"] = *offset;
  j["exit_code"] = code;
  err << j.dump() << "\n";
  return code;
}

Split parse_split(const std::string& s) {
  try {
    return split_from_string(s);
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
}

Arch parse_arch(const std::string& s) {
  try {
    return arch_from_string(s);
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Box-supervised segmentation boosting: pseudo labels from boxes, dual-network training."};
  app.name(args.empty() ? "boxboost" : args[0]);
  app.require_subcommand(1);
  app.allow_extras(false);
  Flags f;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with annotation noise");
  add_common(synth, f);
  synth->add_option("--out", f.out, "Corpus directory")->required();
  {
    const CorpusSpec d;
    synth->add_option("--height", f.height, "Image height")->default_str(std::to_string(d.size.height));
    synth->add_option("--width", f.width, "Image width")->default_str(std::to_string(d.size.width));
    synth->add_option("--train-mask", f.train_mask, "Mask-annotated training images")
        ->default_str(std::to_string(d.train_mask));
    synth->add_option("--train-box", f.train_box, "Box-annotated training images")
        ->default_str(std::to_string(d.train_box));
    synth->add_option("--test", f.test, "Test images")->default_str(std::to_string(d.test));
    synth->add_option("--blur", f.blur, "Fraction of blurred box records")->default_str("0");
    synth->add_option("--no-polyp", f.no_polyp, "Fraction of object-free frames with a spurious box")
        ->default_str("0");
    synth->add_option("--wrong-label", f.wrong_label, "Fraction of boxes taken from another frame")
        ->default_str("0");
    synth->add_option("--imprecise-box", f.imprecise_box, "Fraction of jittered boxes")
        ->default_str("0");
  }

  auto* pretrain = app.add_subcommand("pretrain", "Train one network on the mask-annotated split");
  add_common(pretrain, f);
  add_train(pretrain, f);
  pretrain->add_option("--manifest", f.manifest, "Corpus manifest.jsonl")->required();
  pretrain->add_option("--out", f.out, "Output directory")->required();
  pretrain->add_option("--arch", f.arch, "Network architecture (A or B)")->capture_default_str();

  auto* predict_cmd = app.add_subcommand("predict", "Write 16-bit probability maps for a split");
  add_common(predict_cmd, f);
  predict_cmd->add_option("--checkpoint", f.checkpoint, "Model checkpoint")->required();
  predict_cmd->add_option("--manifest", f.manifest, "Corpus manifest.jsonl")->required();
  predict_cmd->add_option("--split", f.split, "train_mask, train_box or test")->capture_default_str();
  predict_cmd->add_option("--out", f.out, "Output directory")->required();

  auto* ffs = app.add_subcommand("ffs", "Filter box annotations and fuse pseudo labels");
  add_common(ffs, f);
  add_ffs(ffs, f);
  ffs->add_option("--manifest", f.manifest, "Corpus manifest.jsonl")->required();
  ffs->add_option("--predictions", f.predictions, "Directory written by predict")->required();
  ffs->add_option("--out", f.out, "Output directory")->required();

  auto* boost = app.add_subcommand("boost", "Dual-network training on mask labels plus pseudo labels");
  add_common(boost, f);
  add_train(boost, f);
  boost->add_option("--manifest", f.manifest, "Corpus manifest.jsonl")->required();
  boost->add_option("--ffs", f.ffs_dir, "Directory written by ffs")->required();
  boost->add_option("--out", f.out, "Output directory")->required();
  boost->add_flag("--no-ic", f.no_ic, "Drop the consistency loss on uncertain pixels");
  boost->add_option("--warm-r", f.warm_r, "Start arch A from this checkpoint");
  boost->add_option("--warm-p", f.warm_p, "Start arch B from this checkpoint");

  auto* eval = app.add_subcommand("eval", "Test-split Dice/IoU report of a checkpoint");
  add_common(eval, f);
  add_eval_threshold(eval, f);
  eval->add_option("--checkpoint", f.checkpoint, "Model checkpoint")->required();
  eval->add_option("--manifest", f.manifest, "Corpus manifest.jsonl")->required();
  eval->add_option("--out", f.out, "Output directory")->required();

  auto* curve = app.add_subcommand("curve", "Dice-vs-threshold curve of a checkpoint as CSV");
  add_common(curve, f);
  curve->add_option("--checkpoint", f.checkpoint, "Model checkpoint")->required();
  curve->add_option("--manifest", f.manifest, "Corpus manifest.jsonl")->required();
  curve->add_option("--out", f.out, "Output CSV file")->required();
  curve->add_option("--points", f.points, "Evenly spaced thresholds in [0,1]")->capture_default_str();

  auto* ablate = app.add_subcommand("ablate", "baseline / +FFS / +FFS+IC for both archs over seeds");
  add_common(ablate, f);
  add_train(ablate, f);
  add_ffs(ablate, f);
  add_eval_threshold(ablate, f);
  ablate->add_option("--manifest", f.manifest,
                     "Existing corpus; when absent one is generated under OUT/corpus");
  ablate->add_option("--out", f.out, "Output directory")->required();
  ablate->add_option("--seeds", f.seeds, "Comma-separated seed list")->delimiter(',')->default_str("1,2,3");
  ablate->add_option("--rounds", f.rounds, "predict -> ffs -> boost rounds")->default_str("1");
  ablate->add_flag("--warm-start", f.warm_start, "Start boost networks from the baselines");
  ablate->add_option("--predictor", f.predictor, "Arch whose baseline predicts the box split")
      ->default_str("A");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("boxboost");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    for (CLI::App* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report_error(err, "usage", e.what(), kExitUsage);
  }

  Logger log;
  if (!f.quiet) log = [&out](const std::string& line) { out << line << "\n" << std::flush; };

  try {
    if (synth->parsed()) {
      const PipelineConfig cfg = resolve(f, true);
      print_resolved(out, "synth", cfg, {{"out", f.out}});
      const RunRecord r = synth_stage(cfg.corpus, f.out, log);
      out << "manifest: " << (fs::path(f.out) / "manifest.jsonl").string() << "\n";
      (void)r;
    } else if (pretrain->parsed()) {
      const PipelineConfig cfg = resolve(f, false);
      const Arch arch = parse_arch(f.arch);
      print_resolved(out, "pretrain", cfg,
                     {{"manifest", f.manifest}, {"out", f.out}, {"arch", to_string(arch)}});
      pretrain_stage(f.manifest, network_for(arch, cfg.seed), baseline_train_config(cfg, cfg.seed),
                     f.out, log);
    } else if (predict_cmd->parsed()) {
      const PipelineConfig cfg = resolve(f, false);
      const Split split = parse_split(f.split);
      print_resolved(out, "predict", cfg,
                     {{"checkpoint", f.checkpoint}, {"manifest", f.manifest},
                      {"split", to_string(split)}, {"out", f.out}});
      const RunRecord r = predict_stage(f.checkpoint, f.manifest, split, f.out, cfg.workers, log);
      if (!r.metrics.at("errors").empty()) {
        out << r.metrics.at("errors").size() << " record(s) failed; see stage.json\n";
      }
    } else if (ffs->parsed()) {
      const PipelineConfig cfg = resolve(f, false);
      print_resolved(out, "ffs", cfg,
                     {{"manifest", f.manifest}, {"predictions", f.predictions}, {"out", f.out}});
      const RunRecord r = ffs_stage(f.manifest, f.predictions, cfg.ffs, f.out, cfg.workers, log);
      char buf[128];
      std::snprintf(buf, sizeof(buf), "keep rate: %.4f (%zu/%zu)\n",
                    r.metrics.at("keep_rate").get<double>(), r.metrics.at("kept").get<std::size_t>(),
                    r.metrics.at("items").get<std::size_t>());
      out << buf;
    } else if (boost->parsed()) {
      const PipelineConfig cfg = resolve(f, false);
      print_resolved(out, "boost", cfg,
                     {{"manifest", f.manifest}, {"ffs", f.ffs_dir}, {"out", f.out},
                      {"warm_r", f.warm_r}, {"warm_p", f.warm_p}});
      BoostOptions opts;
      opts.consistency = cfg.consistency;
      if (!f.warm_r.empty()) opts.warm_r = f.warm_r;
      if (!f.warm_p.empty()) opts.warm_p = f.warm_p;
      boost_stage(f.manifest, f.ffs_dir, network_for(Arch::kA, cfg.seed),
                  network_for(Arch::kB, cfg.seed), boost_train_config(cfg, cfg.seed), opts, f.out,
                  log);
    } else if (eval->parsed()) {
      const PipelineConfig cfg = resolve(f, false);
      print_resolved(out, "eval", cfg,
                     {{"checkpoint", f.checkpoint}, {"manifest", f.manifest}, {"out", f.out}});
      eval_stage(f.checkpoint, f.manifest, cfg.eval_threshold, f.out, cfg.workers, log);
      out << read_file(fs::path(f.out) / "metrics.csv");
    } else if (curve->parsed()) {
      const PipelineConfig cfg = resolve(f, false);
      if (f.points < 2) throw Error(ErrorKind::kConfig, "--points must be >= 2");
      print_resolved(out, "curve", cfg,
                     {{"checkpoint", f.checkpoint}, {"manifest", f.manifest}, {"out", f.out},
                      {"points", f.points}});
      const Network<float> net = load_checkpoint(f.checkpoint);
      const CorpusManifest m = load_manifest(f.manifest);
      const auto records = m.split(Split::kTest);
      if (records.empty()) throw Error(ErrorKind::kConfig, "TEST split is empty");
      std::vector<ProbMap> preds(records.size());
      std::vector<BinaryMask> gts(records.size());
      parallel_for(records.size(), cfg.workers, [&](std::size_t i) {
        preds[i] = predict(net, to_tensor(read_image(m.resolve(records[i]->image))));
        gts[i] = read_mask(m.resolve(records[i]->ground_truth));
      });
      const std::vector<double> grid = default_thresholds(f.points);
      write_file(f.out, curve_csv(threshold_curve(preds, gts, grid, cfg.workers)));
      out << "curve: " << f.out << "\n";
    } else if (ablate->parsed()) {
      const PipelineConfig cfg = resolve(f, false);
      fs::path manifest = f.manifest;
      print_resolved(out, "ablate", cfg, {{"manifest", f.manifest}, {"out", f.out}});
      if (manifest.empty()) {
        synth_stage(cfg.corpus, fs::path(f.out) / "corpus", log);
        manifest = fs::path(f.out) / "corpus" / "manifest.jsonl";
      }
      const AblationTable table = run_ablation(cfg, manifest, f.out, log);
      out << ablation_csv(table);
    }
  } catch (const ParseError& e) {
    return report_error(err, to_string(e.kind()), e.what(), exit_code_for(e.kind()), e.byte_offset());
  } catch (const Error& e) {
    return report_error(err, to_string(e.kind()), e.what(), exit_code_for(e.kind()));
  } catch (const fs::filesystem_error& e) {
    return report_error(err, "io", e.what(), kExitData);
  } catch (const std::exception& e) {
    return report_error(err, "internal", e.what(), 1);
  }
  return kExitOk;
}

}  // namespace boxboost::cli
