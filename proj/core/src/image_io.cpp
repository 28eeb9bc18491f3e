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

#include "boxboost/image_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "boxboost/error.hpp"

namespace boxboost {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000) throw ParseError(std::string("PGM ") + what + " too large", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("PGM: expected ") + what, start);
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint16_t> to_samples(const std::vector<std::uint8_t>& v) {
  return std::vector<std::uint16_t>(v.begin(), v.end());
}

PgmData decode_8bit(std::string_view bytes, const char* what) {
  PgmData pgm = decode_pgm(bytes);
  if (pgm.maxval != 255) {
    throw ParseError(std::string(what) + ": unsupported depth (maxval " +
                         std::to_string(pgm.maxval) + "); only 8-bit PGM is accepted",
                     0);
  }
  return pgm;
}

std::size_t data_offset(std::string_view bytes, const PgmData& pgm) {
  const std::size_t bps = pgm.maxval > 255 ? 2 : 1;
  return bytes.size() - pgm.samples.size() * bps;
}

}  // namespace

PgmData decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw ParseError("PGM: missing P5 magic", 0);
  }
  HeaderReader reader(bytes);
  reader.advance(2);
  PgmData pgm;
  const long width = reader.read_uint("width");
  const long height = reader.read_uint("height");
  const long maxval = reader.read_uint("maxval");
  if (width < 1 || height < 1) throw ParseError("PGM: zero dimension", reader.pos());
  if (maxval < 1 || maxval > 65535) throw ParseError("PGM: maxval out of range", reader.pos());
  if (reader.pos() >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[reader.pos()]))) {
    throw ParseError("PGM: expected single whitespace before raster", reader.pos());
  }
  reader.advance(1);
  pgm.size = ImageSize{static_cast<int>(height), static_cast<int>(width)};
  pgm.maxval = static_cast<int>(maxval);
  const std::size_t bps = maxval > 255 ? 2 : 1;
  const std::size_t need = pgm.size.pixels() * bps;
  const std::size_t have = bytes.size() - reader.pos();
  if (have < need) {
    throw ParseError("PGM: raster truncated, need " + std::to_string(need) + " bytes, have " +
                         std::to_string(have),
                     reader.pos());
  }
  if (have > need) throw ParseError("PGM: trailing bytes after raster", reader.pos() + need);
  pgm.samples.resize(pgm.size.pixels());
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + reader.pos());
  for (std::size_t i = 0; i < pgm.samples.size(); ++i) {
    const std::uint16_t v =
        bps == 2 ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
    if (v > maxval) {
      throw ParseError("PGM: sample exceeds maxval", reader.pos() + i * bps);
    }
    pgm.samples[i] = v;
  }
  return pgm;
}

std::string encode_pgm(ImageSize size, int maxval, const std::vector<std::uint16_t>& samples) {
  validate(size);
  if (samples.size() != size.pixels()) {
    throw Error(ErrorKind::kShape, "encode_pgm: sample count does not match size");
  }
  std::string out = "P5\n" + std::to_string(size.width) + " " + std::to_string(size.height) +
                    "\n" + std::to_string(maxval) + "\n";
  const bool wide = maxval > 255;
  out.reserve(out.size() + samples.size() * (wide ? 2 : 1));
  for (std::uint16_t v : samples) {
    if (wide) {
      out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xff));
    } else {
      out.push_back(static_cast<char>(v));
    }
  }
  return out;
}

std::string encode_image(const GrayImage& image) {
  return encode_pgm(image.size, 255, to_samples(image.pixels));
}

GrayImage decode_image(std::string_view bytes) {
  PgmData pgm = decode_8bit(bytes, "image");
  GrayImage image;
  image.size = pgm.size;
  image.pixels.assign(pgm.samples.begin(), pgm.samples.end());
  return image;
}

std::string encode_mask(const BinaryMask& mask) {
  std::vector<std::uint16_t> samples(mask.size().pixels());
  const auto bits = mask.bits();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = bits[i] ? kPgmForeground : kPgmBackground;
  }
  return encode_pgm(mask.size(), 255, samples);
}

BinaryMask decode_mask(std::string_view bytes) {
  PgmData pgm = decode_8bit(bytes, "mask");
  const std::size_t base = data_offset(bytes, pgm);
  std::vector<std::uint8_t> bits(pgm.samples.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const auto v = pgm.samples[i];
    if (v != kPgmBackground && v != kPgmForeground) {
      throw ParseError("mask: pixel value " + std::to_string(v) + " is neither 0 nor 255",
                       base + i);
    }
    bits[i] = v == kPgmForeground;
  }
  return BinaryMask(pgm.size, std::move(bits));
}

std::string encode_tri_label(const TriLabelMask& labels) {
  std::vector<std::uint16_t> samples(labels.size().pixels());
  const auto l = labels.labels();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    switch (l[i]) {
      case Label::kBackground: samples[i] = kPgmBackground; break;
      case Label::kUncertain: samples[i] = kPgmUncertain; break;
      case Label::kForeground: samples[i] = kPgmForeground; break;
    }
  }
  return encode_pgm(labels.size(), 255, samples);
}

TriLabelMask decode_tri_label(std::string_view bytes) {
  PgmData pgm = decode_8bit(bytes, "tri-label");
  const std::size_t base = data_offset(bytes, pgm);
  std::vector<Label> labels(pgm.samples.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (pgm.samples[i]) {
      case kPgmBackground: labels[i] = Label::kBackground; break;
      case kPgmUncertain: labels[i] = Label::kUncertain; break;
      case kPgmForeground: labels[i] = Label::kForeground; break;
      default:
        throw ParseError("tri-label: pixel value " + std::to_string(pgm.samples[i]) +
                             " is not one of 0/128/255",
                         base + i);
    }
  }
  return TriLabelMask(pgm.size, std::move(labels));
}

std::string encode_prob_map(const ProbMap& prob) {
  std::vector<std::uint16_t> samples(prob.size().pixels());
  const auto v = prob.values();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = static_cast<std::uint16_t>(std::lround(v[i] * kProbMapMaxval));
  }
  return encode_pgm(prob.size(), kProbMapMaxval, samples);
}

ProbMap decode_prob_map(std::string_view bytes) {
  PgmData pgm = decode_pgm(bytes);
  if (pgm.maxval != kProbMapMaxval) {
    throw ParseError("prob map: expected maxval 65535, got " + std::to_string(pgm.maxval), 0);
  }
  std::vector<double> values(pgm.samples.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<double>(pgm.samples[i]) / kProbMapMaxval;
  }
  return ProbMap(pgm.size, std::move(values));
}

ProbMap quantize_prob_map(const ProbMap& prob) {
  std::vector<double> values(prob.values().begin(), prob.values().end());
  for (double& v : values) {
    v = static_cast<double>(std::lround(v * kProbMapMaxval)) / kProbMapMaxval;
  }
  return ProbMap(prob.size(), std::move(values));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::kIo, "error reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error(ErrorKind::kIo, "cannot create directory '" + path.parent_path().string() +
                                      "': " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "error writing '" + path.string() + "'");
}

namespace {

template <typename Fn>
auto decode_file(const std::filesystem::path& path, Fn&& decode) {
  const std::string bytes = read_file(path);
  try {
    return decode(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.byte_offset());
  }
}

}  // namespace

GrayImage read_image(const std::filesystem::path& path) {
  return decode_file(path, [](std::string_view b) { return decode_image(b); });
}
void write_image(const std::filesystem::path& path, const GrayImage& image) {
  write_file(path, encode_image(image));
}
BinaryMask read_mask(const std::filesystem::path& path) {
  return decode_file(path, [](std::string_view b) { return decode_mask(b); });
}
void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  write_file(path, encode_mask(mask));
}
TriLabelMask read_tri_label(const std::filesystem::path& path) {
  return decode_file(path, [](std::string_view b) { return decode_tri_label(b); });
}
void write_tri_label(const std::filesystem::path& path, const TriLabelMask& labels) {
  write_file(path, encode_tri_label(labels));
}
ProbMap read_prob_map(const std::filesystem::path& path) {
  return decode_file(path, [](std::string_view b) { return decode_prob_map(b); });
}
void write_prob_map(const std::filesystem::path& path, const ProbMap& prob) {
  write_file(path, encode_prob_map(prob));
}

}  // namespace boxboost
