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

// Corpus manifest: JSON-lines, one record per line, UTF-8.
//
//   {"id":"box_0007","split":"train_box","kind":"box","noise":"wrong_label",
//    "image":"images/box_0007.pgm","boxes":[[x0,y0,x1,y1],...],
//    "ground_truth":"gt/box_0007.pgm"}
//
// Mask-annotated records carry "mask" instead of "boxes". Paths are relative
// to the manifest's directory. "ground_truth" is held out: training code
// reads it only for mask-split and test records.

#ifndef BOXBOOST_MANIFEST_HPP_
#define BOXBOOST_MANIFEST_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boxboost/mask.hpp"

namespace boxboost {

enum class AnnotationKind { kMask, kBox };
enum class Split { kTrainMask, kTrainBox, kTest };
enum class NoiseMode { kClean, kBlur, kNoPolyp, kWrongLabel, kImpreciseBox };

const char* to_string(AnnotationKind kind);
const char* to_string(Split split);
const char* to_string(NoiseMode mode);
AnnotationKind annotation_kind_from_string(std::string_view s);
Split split_from_string(std::string_view s);
NoiseMode noise_mode_from_string(std::string_view s);

struct ManifestRecord {
  std::string id;
  Split split = Split::kTrainMask;
  AnnotationKind kind = AnnotationKind::kMask;
  NoiseMode noise = NoiseMode::kClean;
  std::string image;
  std::string mask;          // kind == kMask
  std::vector<Box> boxes;    // kind == kBox
  std::string ground_truth;  // held out

  bool operator==(const ManifestRecord&) const = default;
};

struct CorpusManifest {
  /// Directory that relative record paths resolve against.
  std::filesystem::path root;
  std::vector<ManifestRecord> records;

  std::vector<const ManifestRecord*> split(Split s) const;
  std::filesystem::path resolve(const std::string& relative) const { return root / relative; }
  const ManifestRecord* find(std::string_view id) const;
};

/// Canonical serialisation (fixed key order, one record per line).
std::string serialize_manifest(const std::vector<ManifestRecord>& records);

/// Parses and validates record structure and id uniqueness. Malformed lines
/// throw ParseError with the byte offset into `text`.
std::vector<ManifestRecord> parse_manifest(std::string_view text);

/// Reads `path`, parses it, and checks every referenced file exists (kIo).
CorpusManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records);

}  // namespace boxboost

#endif  // BOXBOOST_MANIFEST_HPP_
