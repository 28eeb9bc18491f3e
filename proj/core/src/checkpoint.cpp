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

#include "boxboost/checkpoint.hpp"

#include <cstring>

#include "boxboost/error.hpp"
#include "boxboost/image_io.hpp"

namespace boxboost {

namespace {

constexpr char kMagic[8] = {'B', 'X', 'B', 'C', 'K', 'P', 'T', '\0'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_bytes(std::string& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw ParseError(std::string("checkpoint: truncated while reading ") + what, pos_);
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::json to_json(const NetworkConfig& cfg) {
  return nlohmann::json{{"arch", to_string(cfg.arch)},
                        {"in_channels", cfg.in_channels},
                        {"widths", cfg.widths},
                        {"kernel", cfg.kernel},
                        {"dilation", cfg.dilation},
                        {"seed", cfg.seed}};
}

NetworkConfig network_config_from_json(const nlohmann::json& j) {
  NetworkConfig cfg;
  try {
    cfg.arch = arch_from_string(j.at("arch").get<std::string>());
    cfg.in_channels = j.at("in_channels").get<int>();
    cfg.widths = j.at("widths").get<std::vector<int>>();
    cfg.kernel = j.at("kernel").get<int>();
    cfg.dilation = j.at("dilation").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("network config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string encode_checkpoint(const Network<float>& net) {
  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kCheckpointVersion);
  put_bytes(out, to_json(net.config()).dump());
  put_u64(out, net.step());
  const auto& params = net.params();
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    put_bytes(out, net.param_names()[i]);
    put_u32(out, static_cast<std::uint32_t>(params[i].shape.size()));
    for (int d : params[i].shape) put_u32(out, static_cast<std::uint32_t>(d));
    for (float v : params[i].data) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      put_u32(out, bits);
    }
  }
  return out;
}

Network<float> decode_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(sizeof(kMagic), "magic") != std::string_view(kMagic, sizeof(kMagic))) {
    throw ParseError("checkpoint: bad magic", 0);
  }
  const std::size_t version_at = r.pos();
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint: unsupported format version " + std::to_string(version),
                     version_at);
  }
  const std::uint32_t cfg_len = r.u32("config length");
  const std::size_t cfg_at = r.pos();
  const std::string_view cfg_text = r.take(cfg_len, "config");
  NetworkConfig cfg;
  try {
    cfg = network_config_from_json(nlohmann::json::parse(cfg_text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("checkpoint: config JSON: ") + e.what(), cfg_at + e.byte);
  } catch (const Error& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), cfg_at);
  }

  Network<float> net(cfg);
  net.set_step(r.u64("step"));
  const std::size_t count_at = r.pos();
  const std::uint32_t count = r.u32("tensor count");
  if (count != net.params().size()) {
    throw ParseError("checkpoint: expected " + std::to_string(net.params().size()) +
                         " tensors for this config, found " + std::to_string(count),
                     count_at);
  }
  std::vector<Tensor<float>> params;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t name_at = r.pos();
    const std::uint32_t name_len = r.u32("tensor name length");
    const std::string name(r.take(name_len, "tensor name"));
    if (name != net.param_names()[i]) {
      throw ParseError("checkpoint: unexpected tensor '" + name + "'", name_at);
    }
    const std::size_t shape_at = r.pos();
    const std::uint32_t rank = r.u32("rank");
    if (rank > 8) throw ParseError("checkpoint: implausible rank", shape_at);
    std::vector<int> shape(rank);
    for (auto& d : shape) d = static_cast<int>(r.u32("dimension"));
    if (shape != net.params()[i].shape) {
      throw ParseError("checkpoint: shape mismatch for '" + name + "'", shape_at);
    }
    Tensor<float> t(shape);
    for (float& v : t.data) {
      const std::uint32_t bits = r.u32("tensor data");
      std::memcpy(&v, &bits, sizeof(v));
    }
    params.push_back(std::move(t));
  }
  if (!r.done()) throw ParseError("checkpoint: trailing bytes", r.pos());
  const std::uint64_t step = net.step();
  net.set_params(std::move(params));
  net.set_step(step);
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const Network<float>& net) {
  write_file(path, encode_checkpoint(net));
}

Network<float> load_checkpoint(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return decode_checkpoint(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.byte_offset());
  }
}

}  // namespace boxboost
