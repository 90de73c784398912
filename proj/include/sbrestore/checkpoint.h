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

#ifndef SBRESTORE_CHECKPOINT_H_
#define SBRESTORE_CHECKPOINT_H_

#include <filesystem>
#include <memory>

#include "sbrestore/denoiser.h"
#include "sbrestore/stft.h"
#include "sbrestore/toy_net.h"

namespace sbrestore {

// Checkpoint file layout (little-endian):
//
//   offset  size  field
//   0       8     magic "SBRCKPT\0"
//   8       4     uint32 format version (currently 1)
//   12      8     uint64 header length H
//   20      H     UTF-8 JSON header
//   20+H    ...   float64 parameter data, tensors in header order
//
// The header carries "stft" {fft_size, win_length, hop}, "sample_rate",
// "rho", "beta_max", "interval" [lo, hi], "network" {channels, blocks,
// freq_dilations, embed_hidden, window_frames, time_embedding_dim} and
// "tensors" [{name, shape}]. Readers ignore unknown header keys and reject
// versions newer than they know.
inline constexpr uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  StftParams stft;
  int sample_rate = 44100;
  double rho = 0.25;
  double beta_max = 1.0;
  TimeInterval interval;
};

struct Checkpoint {
  CheckpointMeta meta;
  std::shared_ptr<ToyNet> net;
};

// Throws std::runtime_error on I/O failure.
void SaveCheckpoint(const std::filesystem::path& path, const ToyNet& net,
                    const CheckpointMeta& meta);

// Throws std::runtime_error for unreadable, truncated or incompatible files.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace sbrestore

#endif  // SBRESTORE_CHECKPOINT_H_
