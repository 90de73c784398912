// Copyright 2026 The sbrestore Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sbrestore/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace sbrestore {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'S', 'B', 'R', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void WritePod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated checkpoint");
  return v;
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, const ToyNet& net,
                    const CheckpointMeta& meta) {
  const ToyNetConfig& cfg = net.config();
  nlohmann::ordered_json header;
  header["stft"] = {{"fft_size", meta.stft.fft_size},
                    {"win_length", meta.stft.win_length},
                    {"hop", meta.stft.hop}};
  header["sample_rate"] = meta.sample_rate;
  header["rho"] = meta.rho;
  header["beta_max"] = meta.beta_max;
  header["interval"] = {meta.interval.lo, meta.interval.hi};
  header["network"] = {{"channels", cfg.channels},
                       {"blocks", cfg.blocks},
                       {"freq_dilations", cfg.freq_dilations},
                       {"embed_hidden", cfg.embed_hidden},
                       {"window_frames", cfg.window_frames},
                       {"time_embedding_dim", kTimeEmbeddingDim}};
  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  for (const ToyNet::NamedTensor& t : net.layout()) {
    tensors.push_back({{"name", t.name}, {"shape", t.shape}});
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.write(kMagic, sizeof(kMagic));
  WritePod<uint32_t>(os, kCheckpointVersion);
  WritePod<uint64_t>(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  os.write(reinterpret_cast<const char*>(net.params().data()),
           static_cast<std::streamsize>(net.params().size() * sizeof(double)));
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path.string() + " is not a checkpoint file");
  }
  const uint32_t version = ReadPod<uint32_t>(is);
  if (version == 0 || version > kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version));
  }
  const uint64_t header_len = ReadPod<uint64_t>(is);
  if (header_len > (64u << 20)) throw std::runtime_error("oversized header");
  std::string text(header_len, '\0');
  is.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!is) throw std::runtime_error("truncated checkpoint header");

  Checkpoint ckpt;
  try {
    const nlohmann::json h = nlohmann::json::parse(text);
    CheckpointMeta& m = ckpt.meta;
    m.stft.fft_size = h.at("stft").at("fft_size").get<int>();
    m.stft.win_length = h.at("stft").at("win_length").get<int>();
    m.stft.hop = h.at("stft").at("hop").get<int>();
    m.sample_rate = h.at("sample_rate").get<int>();
    m.rho = h.at("rho").get<double>();
    m.beta_max = h.at("beta_max").get<double>();
    m.interval = {h.at("interval").at(0).get<double>(),
                  h.at("interval").at(1).get<double>()};
    const nlohmann::json& n = h.at("network");
    if (n.value("time_embedding_dim", kTimeEmbeddingDim) !=
        kTimeEmbeddingDim) {
      throw std::runtime_error("unsupported time embedding size");
    }
    ToyNetConfig cfg;
    cfg.channels = n.at("channels").get<int>();
    cfg.blocks = n.at("blocks").get<int>();
    cfg.freq_dilations = n.at("freq_dilations").get<std::vector<int>>();
    cfg.embed_hidden = n.at("embed_hidden").get<int>();
    cfg.window_frames = n.at("window_frames").get<int>();
    ckpt.net = std::make_shared<ToyNet>(cfg);
    const auto& layout = ckpt.net->layout();
    const nlohmann::json& tensors = h.at("tensors");
    if (tensors.size() != layout.size()) {
      throw std::runtime_error("tensor list does not match architecture");
    }
    for (size_t k = 0; k < layout.size(); ++k) {
      if (tensors[k].at("name").get<std::string>() != layout[k].name ||
          tensors[k].at("shape").get<std::vector<int>>() != layout[k].shape) {
        throw std::runtime_error("tensor '" + layout[k].name +
                                 "' does not match architecture");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed checkpoint header: " +
                             std::string(e.what()));
  }
  ParamVector& params = ckpt.net->params();
  is.read(reinterpret_cast<char*>(params.data()),
          static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated checkpoint parameters");
  return ckpt;
}

}  // namespace sbrestore
