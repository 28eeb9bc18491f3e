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

#include "boxboost/manifest.hpp"

#include <array>
#include <set>

#include <nlohmann/json.hpp>

#include "boxboost/error.hpp"
#include "boxboost/image_io.hpp"

namespace boxboost {

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<Enum, N>& values, const char* what) {
  for (Enum v : values) {
    if (s == to_string(v)) return v;
  }
  throw Error(ErrorKind::kParse, std::string("unknown ") + what + " '" + std::string(s) + "'");
}

ManifestRecord record_from_json(const nlohmann::json& j) {
  ManifestRecord r;
  r.id = j.at("id").get<std::string>();
  r.split = split_from_string(j.at("split").get<std::string>());
  r.kind = annotation_kind_from_string(j.at("kind").get<std::string>());
  r.noise = noise_mode_from_string(j.at("noise").get<std::string>());
  r.image = j.at("image").get<std::string>();
  if (r.kind == AnnotationKind::kMask) {
    r.mask = j.at("mask").get<std::string>();
    if (r.mask.empty()) throw Error(ErrorKind::kParse, "mask record with empty mask path");
  } else {
    for (const auto& b : j.at("boxes")) {
      if (!b.is_array() || b.size() != 4) {
        throw Error(ErrorKind::kParse, "box must be an [x0,y0,x1,y1] array");
      }
      Box box{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
      if (box.x0 < 0 || box.y0 < 0 || box.x0 >= box.x1 || box.y0 >= box.y1) {
        throw Error(ErrorKind::kInvalidAnnotation, "degenerate box " + to_string(box));
      }
      r.boxes.push_back(box);
    }
  }
  if (j.contains("ground_truth")) r.ground_truth = j.at("ground_truth").get<std::string>();
  if (r.id.empty()) throw Error(ErrorKind::kParse, "record id is empty");
  if (r.image.empty()) throw Error(ErrorKind::kParse, "record image path is empty");
  if (r.split == Split::kTest && r.ground_truth.empty()) {
    throw Error(ErrorKind::kParse, "test record '" + r.id + "' lacks ground_truth");
  }
  if (r.split == Split::kTrainBox && r.kind != AnnotationKind::kBox) {
    throw Error(ErrorKind::kParse, "train_box record '" + r.id + "' must be box-annotated");
  }
  if (r.split == Split::kTrainMask && r.kind != AnnotationKind::kMask) {
    throw Error(ErrorKind::kParse, "train_mask record '" + r.id + "' must be mask-annotated");
  }
  return r;
}

ordered_json record_to_json(const ManifestRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["split"] = to_string(r.split);
  j["kind"] = to_string(r.kind);
  j["noise"] = to_string(r.noise);
  j["image"] = r.image;
  if (r.kind == AnnotationKind::kMask) {
    j["mask"] = r.mask;
  } else {
    ordered_json boxes = ordered_json::array();
    for (const Box& b : r.boxes) boxes.push_back({b.x0, b.y0, b.x1, b.y1});
    j["boxes"] = std::move(boxes);
  }
  if (!r.ground_truth.empty()) j["ground_truth"] = r.ground_truth;
  return j;
}

}  // namespace

const char* to_string(AnnotationKind kind) {
  return kind == AnnotationKind::kMask ? "mask" : "box";
}

const char* to_string(Split split) {
  switch (split) {
    case Split::kTrainMask: return "train_mask";
    case Split::kTrainBox: return "train_box";
    case Split::kTest: return "test";
  }
  return "unknown";
}

const char* to_string(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::kClean: return "clean";
    case NoiseMode::kBlur: return "blur";
    case NoiseMode::kNoPolyp: return "no_polyp";
    case NoiseMode::kWrongLabel: return "wrong_label";
    case NoiseMode::kImpreciseBox: return "imprecise_box";
  }
  return "unknown";
}

AnnotationKind annotation_kind_from_string(std::string_view s) {
  return parse_enum(s, std::array{AnnotationKind::kMask, AnnotationKind::kBox},
                    "annotation kind");
}

Split split_from_string(std::string_view s) {
  return parse_enum(s, std::array{Split::kTrainMask, Split::kTrainBox, Split::kTest}, "split");
}

NoiseMode noise_mode_from_string(std::string_view s) {
  return parse_enum(s,
                    std::array{NoiseMode::kClean, NoiseMode::kBlur, NoiseMode::kNoPolyp,
                               NoiseMode::kWrongLabel, NoiseMode::kImpreciseBox},
                    "noise mode");
}

std::vector<const ManifestRecord*> CorpusManifest::split(Split s) const {
  std::vector<const ManifestRecord*> out;
  for (const auto& r : records) {
    if (r.split == s) out.push_back(&r);
  }
  return out;
}

const ManifestRecord* CorpusManifest::find(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::string serialize_manifest(const std::vector<ManifestRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<ManifestRecord> parse_manifest(std::string_view text) {
  std::vector<ManifestRecord> records;
  std::set<std::string> ids;
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    const std::string_view line = text.substr(line_start, line_end - line_start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        const std::size_t at = line_start + (e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(std::string("manifest: malformed JSON: ") + e.what(), at);
      }
      ManifestRecord r;
      try {
        r = record_from_json(j);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest: bad record: ") + e.what(), line_start);
      } catch (const Error& e) {
        throw ParseError(std::string("manifest: ") + e.what(), line_start);
      }
      if (!ids.insert(r.id).second) {
        throw ParseError("manifest: duplicate id '" + r.id + "'", line_start);
      }
      records.push_back(std::move(r));
    }
    line_start = line_end + 1;
  }
  return records;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  CorpusManifest manifest;
  manifest.root = path.parent_path();
  try {
    manifest.records = parse_manifest(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.byte_offset());
  }
  for (const auto& r : manifest.records) {
    for (const std::string* p : {&r.image, &r.mask, &r.ground_truth}) {
      if (p->empty()) continue;
      if (!std::filesystem::exists(manifest.resolve(*p))) {
        throw Error(ErrorKind::kIo,
                    "manifest record '" + r.id + "' references missing file '" + *p + "'");
      }
    }
  }
  return manifest;
}

void save_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records) {
  write_file(path, serialize_manifest(records));
}

}  // namespace boxboost
