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

// Binary PGM (P5) codecs for images, masks, tri-label masks and probability
// maps.
//
//   image      8-bit, maxval 255
//   mask       8-bit, BG = 0, FG = 255
//   tri-label  8-bit, BG = 0, UNCERTAIN = 128, FG = 255
//   prob map   16-bit big-endian, maxval 65535, value = round(p * 65535)
//
// Writers always emit the canonical header "P5\n<w> <h>\n<maxval>\n", so
// reading and re-writing a canonical file reproduces it byte for byte.

#ifndef BOXBOOST_IMAGE_IO_HPP_
#define BOXBOOST_IMAGE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "boxboost/mask.hpp"

namespace boxboost {

struct GrayImage {
  ImageSize size;
  std::vector<std::uint8_t> pixels;  // row-major

  bool operator==(const GrayImage&) const = default;
};

inline constexpr std::uint8_t kPgmBackground = 0;
inline constexpr std::uint8_t kPgmUncertain = 128;
inline constexpr std::uint8_t kPgmForeground = 255;
inline constexpr int kProbMapMaxval = 65535;

struct PgmData {
  ImageSize size;
  int maxval = 255;
  std::vector<std::uint16_t> samples;
};

/// Parses a P5 file. Throws ParseError with the byte offset of the problem.
PgmData decode_pgm(std::string_view bytes);
std::string encode_pgm(ImageSize size, int maxval, const std::vector<std::uint16_t>& samples);

std::string encode_image(const GrayImage& image);
GrayImage decode_image(std::string_view bytes);
std::string encode_mask(const BinaryMask& mask);
BinaryMask decode_mask(std::string_view bytes);
std::string encode_tri_label(const TriLabelMask& labels);
TriLabelMask decode_tri_label(std::string_view bytes);
std::string encode_prob_map(const ProbMap& prob);
ProbMap decode_prob_map(std::string_view bytes);

/// Quantises to the 16-bit grid used on disk.
ProbMap quantize_prob_map(const ProbMap& prob);

/// Whole-file helpers. Missing/unreadable files throw kIo; parent
/// directories are created on write.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

GrayImage read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const GrayImage& image);
BinaryMask read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);
TriLabelMask read_tri_label(const std::filesystem::path& path);
void write_tri_label(const std::filesystem::path& path, const TriLabelMask& labels);
ProbMap read_prob_map(const std::filesystem::path& path);
void write_prob_map(const std::filesystem::path& path, const ProbMap& prob);

}  // namespace boxboost

#endif  // BOXBOOST_IMAGE_IO_HPP_
