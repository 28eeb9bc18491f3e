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

// File-based pipeline stages and the ablation driver.
//
//   synth     corpus/manifest.jsonl + images
//   pretrain  single network on the mask split      -> model.ckpt, train_log.csv
//   predict   probability maps for one split        -> <id>.pgm (16-bit)
//   ffs       filter + fuse box annotations          -> report.jsonl, pseudo/<id>.pgm
//   boost     two networks on mask + pseudo labels   -> net_r.ckpt, net_p.ckpt, train_log.csv
//   eval      test-split metrics of one checkpoint   -> metrics.csv, curve.csv
//
// Every stage writes stage.json into its output directory, recording a hash
// of its configuration and of its inputs and outputs. Re-running a stage
// whose stamp matches is a no-op.

#ifndef BOXBOOST_PIPELINE_HPP_
#define BOXBOOST_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "boxboost/evalbench.hpp"
#include "boxboost/ffs.hpp"
#include "boxboost/manifest.hpp"
#include "boxboost/network.hpp"
#include "boxboost/synth.hpp"
#include "boxboost/trainer.hpp"

namespace boxboost {

namespace fs = std::filesystem;

/// Everything a run needs. Serialised as the "config" object of
/// run_summary.json and accepted back by the CLI's --config.
struct PipelineConfig {
  std::uint64_t seed = 0;
  unsigned workers = 0;
  CorpusSpec corpus;
  TrainConfig train;
  FfsConfig ffs;
  bool consistency = true;
  bool warm_start = false;
  int rounds = 1;
  Arch predictor = Arch::kA;
  double eval_threshold = 0.5;
  std::vector<std::uint64_t> seeds = {1, 2, 3};

  void validate() const;
};

nlohmann::ordered_json to_json(const PipelineConfig& cfg);
/// Fields missing from `j` keep their value from `base`; unknown keys and
/// ill-typed values throw kConfig.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig base = {});

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string hash_file(const fs::path& path);
/// Hash over the sorted (relative path, file hash) list of a directory tree.
std::string hash_tree(const fs::path& dir);

struct StageInput {
  std::string path;
  std::string hash;
};

struct RunRecord {
  std::string stage;
  std::string config_hash;
  std::map<std::string, StageInput> inputs;         // role -> input
  std::map<std::string, std::string> outputs;       // path relative to stage dir -> hash
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  bool reused = false;
};

nlohmann::ordered_json to_json(const RunRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);
RunRecord read_stage_stamp(const fs::path& stage_dir);

/// Per-network seeds derived from a run seed; baseline and boost networks of
/// the same arch start from identical weights.
NetworkConfig network_for(Arch arch, std::uint64_t seed);

/// cfg.train with the worker count and a stage-specific seed filled in.
TrainConfig baseline_train_config(const PipelineConfig& cfg, std::uint64_t seed);
TrainConfig boost_train_config(const PipelineConfig& cfg, std::uint64_t seed);

using Logger = std::function<void(const std::string&)>;

RunRecord synth_stage(const CorpusSpec& spec, const fs::path& out_dir,
                      const Logger& log = {});

/// Trains on the TRAIN_MASK split (kConfig if empty). The epoch length is
/// derived from the TRAIN_BOX split size so that every setting of an
/// ablation runs the same number of optimizer steps.
RunRecord pretrain_stage(const fs::path& manifest, const NetworkConfig& net_cfg,
                         const TrainConfig& train, const fs::path& out_dir,
                         const Logger& log = {});

/// Writes one 16-bit probability map per record of `split`. Records that
/// fail (unreadable image, size the network cannot take) are listed in the
/// record's "errors" metric and skipped.
RunRecord predict_stage(const fs::path& checkpoint, const fs::path& manifest, Split split,
                        const fs::path& out_dir, unsigned workers = 0,
                        const Logger& log = {});

/// Reads predictions/<id>.pgm for every TRAIN_BOX record.
RunRecord ffs_stage(const fs::path& manifest, const fs::path& predictions_dir,
                    const FfsConfig& cfg, const fs::path& out_dir, unsigned workers = 0,
                    const Logger& log = {});

struct BoostOptions {
  bool consistency = true;
  /// When set, networks start from these checkpoints instead of fresh weights.
  std::optional<fs::path> warm_r;
  std::optional<fs::path> warm_p;
};

/// Trains net_r and net_p jointly on the mask split plus every kept pseudo
/// label. Throws kEmptyPseudoSet when the FFS report kept nothing.
RunRecord boost_stage(const fs::path& manifest, const fs::path& ffs_dir,
                      const NetworkConfig& cfg_r, const NetworkConfig& cfg_p,
                      const TrainConfig& train, const BoostOptions& options,
                      const fs::path& out_dir, const Logger& log = {});

/// Scores `checkpoint` on the TEST split. Writes metrics.csv (dataset row and
/// wAVG row) and curve.csv (256-point Dice curve).
RunRecord eval_stage(const fs::path& checkpoint, const fs::path& manifest, double threshold,
                     const fs::path& out_dir, unsigned workers = 0, const Logger& log = {});

enum class Setting { kBaseline, kFfs, kFfsIc };
const char* to_string(Setting s);

struct SeedMetrics {
  std::uint64_t seed = 0;
  Setting setting = Setting::kBaseline;
  Arch arch = Arch::kA;
  double dice = 0.0;
  double iou = 0.0;
};

struct AblationTable {
  std::vector<SeedMetrics> per_seed;

  /// Mean over seeds for one cell.
  SeedMetrics mean(Setting s, Arch a) const;
};

/// setting,A_dice,A_iou,B_dice,B_iou with one row per setting.
std::string ablation_csv(const AblationTable& table);
/// seed,setting,arch,dice,iou.
std::string per_seed_csv(const AblationTable& table);

/// Full method for cfg.seed on an existing corpus: both baselines, then
/// `rounds` x (predict -> ffs -> boost) with cfg.consistency, then eval.
/// Writes run_summary.json into run_dir and returns the test metrics.
std::vector<SeedMetrics> run_pipeline(const PipelineConfig& cfg, const fs::path& manifest,
                                      const fs::path& run_dir, const Logger& log = {});

/// All three settings for both archs over cfg.seeds. Writes
/// ablation.csv, ablation_per_seed.csv and run_summary.json into out_dir.
AblationTable run_ablation(const PipelineConfig& cfg, const fs::path& manifest,
                           const fs::path& out_dir, const Logger& log = {});

}  // namespace boxboost

#endif  // BOXBOOST_PIPELINE_HPP_
