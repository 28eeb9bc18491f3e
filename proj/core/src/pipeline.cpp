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

#include "boxboost/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "boxboost/checkpoint.hpp"
#include "boxboost/error.hpp"
#include "boxboost/image_io.hpp"
#include "boxboost/parallel.hpp"
#include "boxboost/random.hpp"

namespace boxboost {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr const char* kStamp = "stage.json";
constexpr int kStampVersion = 1;

// Stream ids for Rng::derive, one per consumer of a run seed.
constexpr std::uint64_t kNetA = 0xA;
constexpr std::uint64_t kNetB = 0xB;
constexpr std::uint64_t kBaselineTrain = 0x10;
constexpr std::uint64_t kBoostTrain = 0x20;

void emit(const Logger& log, const std::string& line) {
  if (log) log(line);
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// --- config (de)serialisation -------------------------------------------

void check_keys(const json& j, const char* section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(ErrorKind::kConfig, std::string(section) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(ErrorKind::kConfig, std::string("unknown config key '") + section + "." + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ordered_json corpus_json(const CorpusSpec& c) {
  ordered_json noise;
  noise["blur"] = c.noise.blur;
  noise["no_polyp"] = c.noise.no_polyp;
  noise["wrong_label"] = c.noise.wrong_label;
  noise["imprecise_box"] = c.noise.imprecise_box;
  ordered_json j;
  j["height"] = c.size.height;
  j["width"] = c.size.width;
  j["train_mask"] = c.train_mask;
  j["train_box"] = c.train_box;
  j["test"] = c.test;
  j["seed"] = c.seed;
  j["noise"] = noise;
  return j;
}

ordered_json train_json(const TrainConfig& t) {
  ordered_json j;
  j["epochs"] = t.epochs;
  j["batch"] = t.batch;
  j["steps_per_epoch"] = t.steps_per_epoch;
  j["lr"] = t.adamw.lr;
  j["beta1"] = t.adamw.beta1;
  j["beta2"] = t.adamw.beta2;
  j["eps"] = t.adamw.eps;
  j["weight_decay"] = t.adamw.weight_decay;
  j["augment"] = t.augment;
  return j;
}

ordered_json ffs_json(const FfsConfig& f) {
  ordered_json j;
  j["dice_threshold"] = f.dice_threshold;
  j["binarize_threshold"] = f.binarize_threshold;
  return j;
}

std::string config_hash(const std::string& stage, const ordered_json& cfg) {
  ordered_json j;
  j["stage"] = stage;
  j["stamp_version"] = kStampVersion;
  j["config"] = cfg;
  return fnv1a_hex(j.dump());
}

// --- stage stamps ---------------------------------------------------------

class Stage {
 public:
  Stage(std::string name, fs::path dir, const ordered_json& cfg)
      : dir_(std::move(dir)) {
    record_.stage = std::move(name);
    record_.config_hash = config_hash(record_.stage, cfg);
  }

  void input(const std::string& role, const fs::path& path, std::string hash) {
    record_.inputs[role] = StageInput{path.string(), std::move(hash)};
  }

  // True when a previous run left a stamp with the same config, inputs and
  // intact outputs.
  bool reusable(RunRecord& out) const {
    const fs::path stamp = dir_ / kStamp;
    if (!fs::exists(stamp)) return false;
    RunRecord old;
    try {
      old = run_record_from_json(json::parse(read_file(stamp)));
    } catch (const std::exception&) {
      return false;
    }
    if (old.stage != record_.stage || old.config_hash != record_.config_hash) return false;
    if (old.inputs.size() != record_.inputs.size()) return false;
    for (const auto& [role, in] : record_.inputs) {
      auto it = old.inputs.find(role);
      if (it == old.inputs.end() || it->second.hash != in.hash) return false;
    }
    for (const auto& [rel, hash] : old.outputs) {
      const fs::path p = dir_ / rel;
      if (!fs::exists(p) || hash_file(p) != hash) return false;
    }
    out = old;
    out.inputs = record_.inputs;
    out.reused = true;
    return true;
  }

  // Deletes whatever a previous, non-matching run of this stage produced.
  void clear_previous() const {
    const fs::path stamp = dir_ / kStamp;
    if (!fs::exists(stamp)) return;
    try {
      const RunRecord old = run_record_from_json(json::parse(read_file(stamp)));
      for (const auto& [rel, _] : old.outputs) fs::remove(dir_ / rel);
    } catch (const std::exception&) {
    }
    fs::remove(stamp);
  }

  void output(const std::string& rel) { outputs_.push_back(rel); }
  ordered_json& metrics() { return record_.metrics; }

  RunRecord finish() {
    for (const std::string& rel : outputs_) record_.outputs[rel] = hash_file(dir_ / rel);
    write_file(dir_ / kStamp, to_json(record_).dump(2) + "\n");
    return record_;
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  RunRecord record_;
  std::vector<std::string> outputs_;
};

std::string corpus_hash(const fs::path& manifest) { return hash_tree(manifest.parent_path()); }

CorpusManifest load_checked(const fs::path& manifest) {
  if (!fs::exists(manifest)) {
    throw Error(ErrorKind::kIo, "manifest not found: " + manifest.string());
  }
  return load_manifest(manifest);
}

std::vector<TrainSample> mask_samples(const CorpusManifest& m) {
  std::vector<TrainSample> out;
  for (const ManifestRecord* r : m.split(Split::kTrainMask)) {
    const GrayImage image = read_image(m.resolve(r->image));
    const BinaryMask mask = read_mask(m.resolve(r->mask));
    if (!(mask.size() == image.size)) {
      throw Error(ErrorKind::kShape, "record '" + r->id + "': mask size differs from image");
    }
    out.push_back({r->id, to_tensor(image), TriLabelMask::from_binary(mask)});
  }
  return out;
}

TrainObserver progress(const Logger& log, const std::string& tag, std::uint64_t total) {
  if (!log) return {};
  const std::uint64_t every = std::max<std::uint64_t>(1, total / 10);
  return [log, tag, total, every](const TrainLogRow& row) {
    if (row.step % every == 0 || row.step == total) {
      log("[" + tag + "] step " + std::to_string(row.step) + "/" + std::to_string(total) +
          " loss " + format("%.4f", row.loss) + (row.ic > 0 ? " ic " + format("%.4f", row.ic) : ""));
    }
  };
}

std::string pgm_name(const std::string& id) { return id + ".pgm"; }

}  // namespace

// --- config -------------------------------------------------------------

void PipelineConfig::validate() const {
  try {
    corpus.validate();
    ffs.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
  train.validate();
  if (rounds < 1) throw Error(ErrorKind::kConfig, "rounds must be >= 1");
  if (!(eval_threshold >= 0.0 && eval_threshold <= 1.0)) {
    throw Error(ErrorKind::kConfig, "eval threshold must lie in [0,1]");
  }
  if (seeds.empty()) throw Error(ErrorKind::kConfig, "seed list is empty");
}

ordered_json to_json(const PipelineConfig& cfg) {
  ordered_json j;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["seeds"] = cfg.seeds;
  j["corpus"] = corpus_json(cfg.corpus);
  j["train"] = train_json(cfg.train);
  j["ffs"] = ffs_json(cfg.ffs);
  ordered_json boost;
  boost["consistency"] = cfg.consistency;
  boost["warm_start"] = cfg.warm_start;
  boost["rounds"] = cfg.rounds;
  boost["predictor"] = to_string(cfg.predictor);
  j["boost"] = boost;
  j["eval"] = ordered_json{{"threshold", cfg.eval_threshold}};
  return j;
}

PipelineConfig pipeline_config_from_json(const json& j, PipelineConfig cfg) {
  try {
    check_keys(j, "config", {"seed", "workers", "seeds", "corpus", "train", "ffs", "boost", "eval"});
    read(j, "seed", cfg.seed);
    read(j, "workers", cfg.workers);
    read(j, "seeds", cfg.seeds);
    if (j.contains("corpus")) {
      const json& c = j.at("corpus");
      check_keys(c, "corpus", {"height", "width", "train_mask", "train_box", "test", "seed", "noise"});
      read(c, "height", cfg.corpus.size.height);
      read(c, "width", cfg.corpus.size.width);
      read(c, "train_mask", cfg.corpus.train_mask);
      read(c, "train_box", cfg.corpus.train_box);
      read(c, "test", cfg.corpus.test);
      read(c, "seed", cfg.corpus.seed);
      if (c.contains("noise")) {
        const json& n = c.at("noise");
        check_keys(n, "corpus.noise", {"blur", "no_polyp", "wrong_label", "imprecise_box"});
        read(n, "blur", cfg.corpus.noise.blur);
        read(n, "no_polyp", cfg.corpus.noise.no_polyp);
        read(n, "wrong_label", cfg.corpus.noise.wrong_label);
        read(n, "imprecise_box", cfg.corpus.noise.imprecise_box);
      }
    }
    if (j.contains("train")) {
      const json& t = j.at("train");
      check_keys(t, "train", {"epochs", "batch", "steps_per_epoch", "lr", "beta1", "beta2", "eps",
                              "weight_decay", "augment"});
      read(t, "epochs", cfg.train.epochs);
      read(t, "batch", cfg.train.batch);
      read(t, "steps_per_epoch", cfg.train.steps_per_epoch);
      read(t, "lr", cfg.train.adamw.lr);
      read(t, "beta1", cfg.train.adamw.beta1);
      read(t, "beta2", cfg.train.adamw.beta2);
      read(t, "eps", cfg.train.adamw.eps);
      read(t, "weight_decay", cfg.train.adamw.weight_decay);
      read(t, "augment", cfg.train.augment);
    }
    if (j.contains("ffs")) {
      const json& f = j.at("ffs");
      check_keys(f, "ffs", {"dice_threshold", "binarize_threshold"});
      read(f, "dice_threshold", cfg.ffs.dice_threshold);
      read(f, "binarize_threshold", cfg.ffs.binarize_threshold);
    }
    if (j.contains("boost")) {
      const json& b = j.at("boost");
      check_keys(b, "boost", {"consistency", "warm_start", "rounds", "predictor"});
      read(b, "consistency", cfg.consistency);
      read(b, "warm_start", cfg.warm_start);
      read(b, "rounds", cfg.rounds);
      if (b.contains("predictor")) cfg.predictor = arch_from_string(b.at("predictor").get<std::string>());
    }
    if (j.contains("eval")) {
      const json& e = j.at("eval");
      check_keys(e, "eval", {"threshold"});
      read(e, "threshold", cfg.eval_threshold);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    throw Error(ErrorKind::kConfig, std::string("config: ") + e.what());
  }
  return cfg;
}

// --- hashing --------------------------------------------------------------

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string hash_file(const fs::path& path) { return fnv1a_hex(read_file(path)); }

std::string hash_tree(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::kIo, "not a directory: " + dir.string());
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir).generic_string());
  }
  std::sort(files.begin(), files.end());
  std::string listing;
  for (const std::string& f : files) listing += f + "\t" + hash_file(dir / f) + "\n";
  return fnv1a_hex(listing);
}

// --- run records ----------------------------------------------------------

ordered_json to_json(const RunRecord& r) {
  ordered_json j;
  j["stage"] = r.stage;
  j["config_hash"] = r.config_hash;
  ordered_json inputs = ordered_json::object();
  for (const auto& [role, in] : r.inputs) inputs[role] = {{"path", in.path}, {"hash", in.hash}};
  j["inputs"] = inputs;
  ordered_json outputs = ordered_json::object();
  for (const auto& [rel, hash] : r.outputs) outputs[rel] = hash;
  j["outputs"] = outputs;
  j["metrics"] = r.metrics;
  return j;
}

RunRecord run_record_from_json(const json& j) {
  RunRecord r;
  try {
    r.stage = j.at("stage").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& [role, in] : j.at("inputs").items()) {
      r.inputs[role] = StageInput{in.at("path").get<std::string>(), in.at("hash").get<std::string>()};
    }
    for (const auto& [rel, hash] : j.at("outputs").items()) r.outputs[rel] = hash.get<std::string>();
    r.metrics = ordered_json::parse(j.at("metrics").dump());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("stage record: ") + e.what());
  }
  return r;
}

RunRecord read_stage_stamp(const fs::path& stage_dir) {
  try {
    return run_record_from_json(json::parse(read_file(stage_dir / kStamp)));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("stage record: ") + e.what(), e.byte);
  }
}

NetworkConfig network_for(Arch arch, std::uint64_t seed) {
  return arch == Arch::kA ? NetworkConfig::arch_a(Rng::derive(seed, kNetA))
                          : NetworkConfig::arch_b(Rng::derive(seed, kNetB));
}

TrainConfig baseline_train_config(const PipelineConfig& cfg, std::uint64_t seed) {
  TrainConfig t = cfg.train;
  t.workers = cfg.workers;
  t.seed = Rng::derive(seed, kBaselineTrain);
  return t;
}

TrainConfig boost_train_config(const PipelineConfig& cfg, std::uint64_t seed) {
  TrainConfig t = cfg.train;
  t.workers = cfg.workers;
  t.seed = Rng::derive(seed, kBoostTrain);
  return t;
}

// --- stages ---------------------------------------------------------------

RunRecord synth_stage(const CorpusSpec& spec, const fs::path& out_dir, const Logger& log) {
  Stage stage("synth", out_dir, corpus_json(spec));
  RunRecord reused;
  if (stage.reusable(reused)) {
    emit(log, "[synth] up to date: " + out_dir.string());
    return reused;
  }
  stage.clear_previous();
  const CorpusManifest m = generate_corpus(spec, out_dir);
  stage.output("manifest.jsonl");
  for (const ManifestRecord& r : m.records) {
    stage.output(r.image);
    if (!r.mask.empty() && r.mask != r.ground_truth) stage.output(r.mask);
    stage.output(r.ground_truth);
  }
  const NoiseCounts counts = noise_counts(spec.noise, spec.train_box);
  stage.metrics()["records"] = m.records.size();
  stage.metrics()["noise_counts"] = {{"clean", counts.clean},
                                     {"blur", counts.blur},
                                     {"no_polyp", counts.no_polyp},
                                     {"wrong_label", counts.wrong_label},
                                     {"imprecise_box", counts.imprecise_box}};
  emit(log, "[synth] wrote " + std::to_string(m.records.size()) + " records to " +
                out_dir.string());
  return stage.finish();
}

RunRecord pretrain_stage(const fs::path& manifest, const NetworkConfig& net_cfg,
                         const TrainConfig& train, const fs::path& out_dir, const Logger& log) {
  const CorpusManifest m = load_checked(manifest);
  net_cfg.validate();
  ordered_json cfg;
  cfg["network"] = to_json(net_cfg);
  cfg["train"] = train_json(train);
  cfg["train_seed"] = train.seed;
  Stage stage("pretrain", out_dir, cfg);
  stage.input("corpus", manifest, corpus_hash(manifest));
  RunRecord reused;
  if (stage.reusable(reused)) {
    emit(log, "[pretrain] up to date: " + out_dir.string());
    return reused;
  }
  const std::vector<TrainSample> items = mask_samples(m);
  if (items.empty()) throw Error(ErrorKind::kConfig, "TRAIN_MASK split is empty");
  stage.clear_previous();

  const int spe = resolve_steps_per_epoch(train, items.size(), m.split(Split::kTrainBox).size());
  const std::uint64_t total = static_cast<std::uint64_t>(train.epochs) * spe;
  Network<float> net(net_cfg);
  const std::string tag = std::string("pretrain ") + to_string(net_cfg.arch);
  const auto rows = train_single(net, items, {}, train, spe, progress(log, tag, total));
  save_checkpoint(out_dir / "model.ckpt", net);
  write_file(out_dir / "train_log.csv", train_log_csv(rows));
  stage.output("model.ckpt");
  stage.output("train_log.csv");
  stage.metrics()["steps"] = total;
  stage.metrics()["final_loss"] = rows.empty() ? 0.0 : rows.back().loss;
  return stage.finish();
}

RunRecord predict_stage(const fs::path& checkpoint, const fs::path& manifest, Split split,
                        const fs::path& out_dir, unsigned workers, const Logger& log) {
  const CorpusManifest m = load_checked(manifest);
  ordered_json cfg;
  cfg["split"] = to_string(split);
  Stage stage("predict", out_dir, cfg);
  stage.input("corpus", manifest, corpus_hash(manifest));
  stage.input("checkpoint", checkpoint, hash_file(checkpoint));
  RunRecord reused;
  if (stage.reusable(reused)) {
    emit(log, "[predict] up to date: " + out_dir.string());
    return reused;
  }
  const Network<float> net = load_checkpoint(checkpoint);
  stage.clear_previous();

  const auto records = m.split(split);
  std::vector<std::optional<std::string>> errors(records.size());
  parallel_for(records.size(), workers, [&](std::size_t i) {
    try {
      const GrayImage image = read_image(m.resolve(records[i]->image));
      write_prob_map(out_dir / pgm_name(records[i]->id), predict(net, to_tensor(image)));
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  ordered_json errs = ordered_json::array();
  std::size_t written = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (errors[i]) {
      errs.push_back({{"id", records[i]->id}, {"error", *errors[i]}});
      emit(log, "[predict] " + records[i]->id + ": " + *errors[i]);
    } else {
      stage.output(pgm_name(records[i]->id));
      ++written;
    }
  }
  stage.metrics()["predicted"] = written;
  stage.metrics()["errors"] = errs;
  emit(log, "[predict] " + std::to_string(written) + "/" + std::to_string(records.size()) +
                " maps written to " + out_dir.string());
  return stage.finish();
}

RunRecord ffs_stage(const fs::path& manifest, const fs::path& predictions_dir,
                    const FfsConfig& cfg, const fs::path& out_dir, unsigned workers,
                    const Logger& log) {
  cfg.validate();
  const CorpusManifest m = load_checked(manifest);
  Stage stage("ffs", out_dir, ffs_json(cfg));
  stage.input("corpus", manifest, corpus_hash(manifest));
  stage.input("predictions", predictions_dir, hash_tree(predictions_dir));
  RunRecord reused;
  if (stage.reusable(reused)) {
    emit(log, "[ffs] up to date: " + out_dir.string());
    return reused;
  }
  stage.clear_previous();

  const auto records = m.split(Split::kTrainBox);
  // Items that cannot even be loaded are reported without entering the batch.
  std::vector<std::optional<std::string>> load_errors(records.size());
  std::vector<std::pair<BinaryMask, ProbMap>> pairs;
  std::vector<std::size_t> batch_index(records.size(), 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      ProbMap p = read_prob_map(predictions_dir / pgm_name(records[i]->id));
      BinaryMask b = rasterize_boxes(records[i]->boxes, p.size());
      batch_index[i] = pairs.size();
      pairs.emplace_back(std::move(b), std::move(p));
    } catch (const Error& e) {
      load_errors[i] = e.what();
    }
  }
  const std::vector<FfsItemResult> results = ffs_corpus(pairs, cfg, workers);

  std::string report;
  std::size_t kept = 0, errors = 0;
  std::map<std::string, std::size_t> by_reason;
  for (std::size_t i = 0; i < records.size(); ++i) {
    ordered_json line;
    line["id"] = records[i]->id;
    std::optional<std::string> err = load_errors[i];
    const FfsItemResult* res = err ? nullptr : &results[batch_index[i]];
    if (res && !res->ok()) err = res->error;
    if (err) {
      line["dice"] = nullptr;
      line["kept"] = false;
      line["reason"] = "ERROR";
      line["error"] = *err;
      ++errors;
    } else {
      line["dice"] = res->decision->dice_score;
      line["kept"] = res->decision->kept;
      line["reason"] = to_string(res->decision->reason);
      ++by_reason[to_string(res->decision->reason)];
      if (res->decision->kept) {
        const std::string rel = "pseudo/" + pgm_name(records[i]->id);
        write_tri_label(out_dir / rel, *res->pseudo);
        stage.output(rel);
        ++kept;
      }
    }
    report += line.dump() + "\n";
  }
  write_file(out_dir / "report.jsonl", report);
  stage.output("report.jsonl");
  const double rate = records.empty() ? 0.0 : static_cast<double>(kept) / records.size();
  stage.metrics()["items"] = records.size();
  stage.metrics()["kept"] = kept;
  stage.metrics()["errors"] = errors;
  stage.metrics()["keep_rate"] = rate;
  ordered_json reasons = ordered_json::object();
  for (const auto& [k, v] : by_reason) reasons[k] = v;
  stage.metrics()["reasons"] = reasons;
  emit(log, "[ffs] kept " + std::to_string(kept) + "/" + std::to_string(records.size()) +
                " (keep rate " + format("%.3f", rate) + ")");
  return stage.finish();
}

RunRecord boost_stage(const fs::path& manifest, const fs::path& ffs_dir,
                      const NetworkConfig& cfg_r, const NetworkConfig& cfg_p,
                      const TrainConfig& train, const BoostOptions& options,
                      const fs::path& out_dir, const Logger& log) {
  const CorpusManifest m = load_checked(manifest);
  cfg_r.validate();
  cfg_p.validate();
  ordered_json cfg;
  cfg["network_r"] = to_json(cfg_r);
  cfg["network_p"] = to_json(cfg_p);
  cfg["train"] = train_json(train);
  cfg["train_seed"] = train.seed;
  cfg["consistency"] = options.consistency;
  cfg["warm_start"] = options.warm_r.has_value();
  Stage stage("boost", out_dir, cfg);
  stage.input("corpus", manifest, corpus_hash(manifest));
  stage.input("ffs", ffs_dir, hash_tree(ffs_dir));
  if (options.warm_r) stage.input("warm_r", *options.warm_r, hash_file(*options.warm_r));
  if (options.warm_p) stage.input("warm_p", *options.warm_p, hash_file(*options.warm_p));
  RunRecord reused;
  if (stage.reusable(reused)) {
    emit(log, "[boost] up to date: " + out_dir.string());
    return reused;
  }

  const std::vector<TrainSample> mask_items = mask_samples(m);
  std::vector<TrainSample> box_items;
  std::vector<std::string> ids;
  const std::string report = read_file(ffs_dir / "report.jsonl");
  std::size_t line_start = 0;
  while (line_start < report.size()) {
    std::size_t end = report.find('\n', line_start);
    if (end == std::string::npos) end = report.size();
    const std::string_view text(report.data() + line_start, end - line_start);
    if (!text.empty()) {
      json line;
      try {
        line = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ParseError("ffs report: " + std::string(e.what()), line_start);
      }
      if (line.value("kept", false)) {
        const std::string id = line.at("id").get<std::string>();
        const ManifestRecord* r = m.find(id);
        if (!r || r->split != Split::kTrainBox) {
          throw Error(ErrorKind::kConfig, "ffs report names unknown box record '" + id + "'");
        }
        const GrayImage image = read_image(m.resolve(r->image));
        TriLabelMask pseudo = read_tri_label(ffs_dir / "pseudo" / pgm_name(id));
        if (!(pseudo.size() == image.size)) {
          throw Error(ErrorKind::kShape, "pseudo label for '" + id + "' differs in size");
        }
        box_items.push_back({id, to_tensor(image), std::move(pseudo)});
        ids.push_back(id);
      }
    }
    line_start = end + 1;
  }
  if (box_items.empty()) {
    throw Error(ErrorKind::kEmptyPseudoSet,
                "FFS kept no box-annotated records; nothing to boost-train on");
  }
  stage.clear_previous();

  Network<float> net_r = options.warm_r ? load_checkpoint(*options.warm_r) : Network<float>(cfg_r);
  Network<float> net_p = options.warm_p ? load_checkpoint(*options.warm_p) : Network<float>(cfg_p);
  if (!(net_r.config() == cfg_r) || !(net_p.config() == cfg_p)) {
    throw Error(ErrorKind::kConfig, "warm-start checkpoint does not match the network config");
  }
  net_r.set_step(0);
  net_p.set_step(0);
  const int spe = resolve_steps_per_epoch(train, mask_items.size(), m.split(Split::kTrainBox).size());
  const std::uint64_t total = static_cast<std::uint64_t>(train.epochs) * spe;
  const std::string tag = options.consistency ? "boost +ic" : "boost";
  const auto rows = train_dual(net_r, net_p, mask_items, box_items, train, spe,
                               options.consistency, progress(log, tag, total));
  save_checkpoint(out_dir / "net_r.ckpt", net_r);
  save_checkpoint(out_dir / "net_p.ckpt", net_p);
  write_file(out_dir / "train_log.csv", train_log_csv(rows));
  stage.output("net_r.ckpt");
  stage.output("net_p.ckpt");
  stage.output("train_log.csv");
  stage.metrics()["steps"] = total;
  stage.metrics()["mask_items"] = mask_items.size();
  stage.metrics()["box_ids"] = ids;
  stage.metrics()["final_loss"] = rows.empty() ? 0.0 : rows.back().loss;
  stage.metrics()["final_ic"] = rows.empty() ? 0.0 : rows.back().ic;
  return stage.finish();
}

RunRecord eval_stage(const fs::path& checkpoint, const fs::path& manifest, double threshold,
                     const fs::path& out_dir, unsigned workers, const Logger& log) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::kConfig, "eval threshold must lie in [0,1]");
  }
  const CorpusManifest m = load_checked(manifest);
  ordered_json cfg;
  cfg["threshold"] = threshold;
  Stage stage("eval", out_dir, cfg);
  stage.input("corpus", manifest, corpus_hash(manifest));
  stage.input("checkpoint", checkpoint, hash_file(checkpoint));
  RunRecord reused;
  if (stage.reusable(reused)) {
    emit(log, "[eval] up to date: " + out_dir.string());
    return reused;
  }
  const Network<float> net = load_checkpoint(checkpoint);
  const auto records = m.split(Split::kTest);
  if (records.empty()) throw Error(ErrorKind::kConfig, "TEST split is empty");
  stage.clear_previous();

  std::vector<ProbMap> preds(records.size());
  std::vector<BinaryMask> gts(records.size());
  parallel_for(records.size(), workers, [&](std::size_t i) {
    preds[i] = predict(net, to_tensor(read_image(m.resolve(records[i]->image))));
    gts[i] = read_mask(m.resolve(records[i]->ground_truth));
  });
  const DatasetReport report = evaluate_dataset(preds, gts, threshold, "test", workers);
  const std::vector<double> grid = default_thresholds();
  const ThresholdCurve curve = threshold_curve(preds, gts, grid, workers);
  write_file(out_dir / "metrics.csv", report_csv(std::span(&report, 1)));
  write_file(out_dir / "curve.csv", curve_csv(curve));
  stage.output("metrics.csv");
  stage.output("curve.csv");
  stage.metrics()["count"] = report.count;
  stage.metrics()["dice"] = report.dice;
  stage.metrics()["iou"] = report.iou;
  emit(log, std::string("[eval ") + to_string(net.config().arch) + "] dice " +
                format("%.4f", report.dice) + " iou " + format("%.4f", report.iou));
  return stage.finish();
}

// --- drivers --------------------------------------------------------------

const char* to_string(Setting s) {
  switch (s) {
    case Setting::kBaseline: return "baseline";
    case Setting::kFfs: return "+FFS";
    case Setting::kFfsIc: return "+FFS+IC";
  }
  return "unknown";
}

SeedMetrics AblationTable::mean(Setting s, Arch a) const {
  SeedMetrics out;
  out.setting = s;
  out.arch = a;
  int n = 0;
  for (const SeedMetrics& m : per_seed) {
    if (m.setting != s || m.arch != a) continue;
    out.dice += m.dice;
    out.iou += m.iou;
    ++n;
  }
  if (n == 0) throw Error(ErrorKind::kParameter, "no rows for requested ablation cell");
  out.dice /= n;
  out.iou /= n;
  return out;
}

std::string ablation_csv(const AblationTable& table) {
  std::string out = "setting,A_dice,A_iou,B_dice,B_iou\n";
  for (Setting s : {Setting::kBaseline, Setting::kFfs, Setting::kFfsIc}) {
    const SeedMetrics a = table.mean(s, Arch::kA);
    const SeedMetrics b = table.mean(s, Arch::kB);
    out += std::string(to_string(s)) + "," + format("%.6f", a.dice) + "," + format("%.6f", a.iou) +
           "," + format("%.6f", b.dice) + "," + format("%.6f", b.iou) + "\n";
  }
  return out;
}

std::string per_seed_csv(const AblationTable& table) {
  std::string out = "seed,setting,arch,dice,iou\n";
  for (const SeedMetrics& m : table.per_seed) {
    out += std::to_string(m.seed) + "," + to_string(m.setting) + "," + to_string(m.arch) + "," +
           format("%.6f", m.dice) + "," + format("%.6f", m.iou) + "\n";
  }
  return out;
}

namespace {

const char* setting_dir(Setting s) {
  switch (s) {
    case Setting::kBaseline: return "baseline";
    case Setting::kFfs: return "ffs";
    case Setting::kFfsIc: return "ffs_ic";
  }
  return "unknown";
}

struct SeedRun {
  std::vector<SeedMetrics> metrics;
  std::vector<RunRecord> records;
};

SeedRun run_seed(const PipelineConfig& cfg, std::uint64_t seed, const fs::path& manifest,
                 const fs::path& dir, const std::vector<Setting>& boost_settings,
                 const Logger& log) {
  SeedRun out;
  const NetworkConfig cfg_a = network_for(Arch::kA, seed);
  const NetworkConfig cfg_b = network_for(Arch::kB, seed);
  auto score = [&](Setting s, Arch arch, const fs::path& ckpt, const fs::path& eval_dir) {
    RunRecord r = eval_stage(ckpt, manifest, cfg.eval_threshold, eval_dir, cfg.workers, log);
    out.metrics.push_back({seed, s, arch, r.metrics.at("dice").get<double>(),
                           r.metrics.at("iou").get<double>()});
    out.records.push_back(std::move(r));
  };

  const TrainConfig base_train = baseline_train_config(cfg, seed);
  for (const NetworkConfig& nc : {cfg_a, cfg_b}) {
    const fs::path d = dir / "baseline" / to_string(nc.arch);
    out.records.push_back(pretrain_stage(manifest, nc, base_train, d, log));
    score(Setting::kBaseline, nc.arch, d / "model.ckpt",
          dir / "metrics" / (std::string("baseline_") + to_string(nc.arch)));
  }

  const TrainConfig boost_train = boost_train_config(cfg, seed);
  const fs::path first_predictor = dir / "baseline" / to_string(cfg.predictor) / "model.ckpt";
  for (Setting s : boost_settings) {
    fs::path predictor = first_predictor;
    fs::path warm_r = dir / "baseline" / "A" / "model.ckpt";
    fs::path warm_p = dir / "baseline" / "B" / "model.ckpt";
    for (int round = 1; round <= cfg.rounds; ++round) {
      // Round 1 artifacts are shared by every setting; later rounds depend on
      // the setting's own networks.
      const fs::path round_dir =
          round == 1 ? dir : dir / ("round_" + std::to_string(round)) / setting_dir(s);
      out.records.push_back(predict_stage(predictor, manifest, Split::kTrainBox,
                                          round_dir / "predictions", cfg.workers, log));
      out.records.push_back(ffs_stage(manifest, round_dir / "predictions", cfg.ffs,
                                      round_dir / "ffs", cfg.workers, log));
      BoostOptions opts;
      opts.consistency = s == Setting::kFfsIc;
      if (cfg.warm_start) {
        opts.warm_r = warm_r;
        opts.warm_p = warm_p;
      }
      const fs::path boost_dir = round_dir / "boost" / setting_dir(s);
      out.records.push_back(boost_stage(manifest, round_dir / "ffs", cfg_a, cfg_b, boost_train,
                                        opts, boost_dir, log));
      warm_r = boost_dir / "net_r.ckpt";
      warm_p = boost_dir / "net_p.ckpt";
      predictor = cfg.predictor == Arch::kA ? warm_r : warm_p;
    }
    score(s, Arch::kA, warm_r, dir / "metrics" / (std::string(setting_dir(s)) + "_A"));
    score(s, Arch::kB, warm_p, dir / "metrics" / (std::string(setting_dir(s)) + "_B"));
  }
  return out;
}

ordered_json metrics_json(const std::vector<SeedMetrics>& ms) {
  ordered_json arr = ordered_json::array();
  for (const SeedMetrics& m : ms) {
    arr.push_back({{"seed", m.seed},
                   {"setting", to_string(m.setting)},
                   {"arch", to_string(m.arch)},
                   {"dice", m.dice},
                   {"iou", m.iou}});
  }
  return arr;
}

void write_summary(const fs::path& path, const PipelineConfig& cfg, const fs::path& manifest,
                   const std::vector<RunRecord>& records, const std::vector<SeedMetrics>& metrics) {
  ordered_json j;
  j["config"] = to_json(cfg);
  j["manifest"] = manifest.string();
  j["corpus_hash"] = corpus_hash(manifest);
  ordered_json stages = ordered_json::array();
  for (const RunRecord& r : records) stages.push_back(to_json(r));
  j["stages"] = stages;
  j["metrics"] = metrics_json(metrics);
  write_file(path, j.dump(2) + "\n");
}

}  // namespace

std::vector<SeedMetrics> run_pipeline(const PipelineConfig& cfg, const fs::path& manifest,
                                      const fs::path& run_dir, const Logger& log) {
  cfg.validate();
  const Setting s = cfg.consistency ? Setting::kFfsIc : Setting::kFfs;
  SeedRun run = run_seed(cfg, cfg.seed, manifest, run_dir, {s}, log);
  write_summary(run_dir / "run_summary.json", cfg, manifest, run.records, run.metrics);
  return run.metrics;
}

AblationTable run_ablation(const PipelineConfig& cfg, const fs::path& manifest,
                           const fs::path& out_dir, const Logger& log) {
  cfg.validate();
  std::set<std::uint64_t> unique(cfg.seeds.begin(), cfg.seeds.end());
  if (unique.size() != cfg.seeds.size()) throw Error(ErrorKind::kConfig, "duplicate seeds");
  AblationTable table;
  std::vector<RunRecord> records;
  for (std::uint64_t seed : cfg.seeds) {
    emit(log, "[ablate] seed " + std::to_string(seed));
    SeedRun run = run_seed(cfg, seed, manifest, out_dir / ("seed_" + std::to_string(seed)),
                           {Setting::kFfs, Setting::kFfsIc}, log);
    table.per_seed.insert(table.per_seed.end(), run.metrics.begin(), run.metrics.end());
    records.insert(records.end(), run.records.begin(), run.records.end());
  }
  write_file(out_dir / "ablation.csv", ablation_csv(table));
  write_file(out_dir / "ablation_per_seed.csv", per_seed_csv(table));
  write_summary(out_dir / "run_summary.json", cfg, manifest, records, table.per_seed);
  return table;
}

}  // namespace boxboost
