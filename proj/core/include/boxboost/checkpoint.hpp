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

// Checkpoint container (all integers little-endian):
//
//   "BXBCKPT\0"                 8-byte magic
//   u32 format version          currently 1
//   u32 n, n bytes              network config as compact JSON
//   u64 optimizer step
//   u32 tensor count
//   per tensor:
//     u32 n, n bytes            tensor name
//     u32 rank, rank x u32      shape
//     numel x f32               values, IEEE-754 binary32 little-endian

#ifndef BOXBOOST_CHECKPOINT_HPP_
#define BOXBOOST_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "boxboost/network.hpp"

namespace boxboost {

inline constexpr std::uint32_t kCheckpointVersion = 1;

nlohmann::json to_json(const NetworkConfig& cfg);
NetworkConfig network_config_from_json(const nlohmann::json& j);

std::string encode_checkpoint(const Network<float>& net);
/// Throws ParseError (with byte offset) on malformed input.
Network<float> decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Network<float>& net);
Network<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace boxboost

#endif  // BOXBOOST_CHECKPOINT_HPP_
