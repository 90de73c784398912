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

#ifndef SBRESTORE_CLI_RUN_CONFIG_H_
#define SBRESTORE_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sbrestore/mask.h"
#include "sbrestore/resample.h"
#include "sbrestore/sampler.h"
#include "sbrestore/stft.h"

namespace sbrestore::cli {

struct TrainOptions {
  int steps = 1500;
  int pretrain_steps = 0;
  int partitions = 1;
  int batch_size = 1;
  double learning_rate = 1e-3;
  // Synthetic corpus size when no corpus directory is given.
  int segments = 500;
  std::string corpus_dir;
  int channels = 24;
  int blocks = 4;
  int embed_hidden = 64;
  int window_frames = 64;
  bool frequency_loss_mask = false;
  DegradationConfig degradation{1.0, 1000.0, 3000.0, 0.1, 0.35, 0.5};
};

struct EvalOptions {
  std::vector<double> cutoffs_hz = {4000.0, 8000.0, 12000.0};
  std::vector<double> gaps_ms = {300.0, 500.0, 1000.0};
};

// Every knob of every subcommand. Loaded from a JSON file and then
// overridden by flags; snapshotted verbatim into manifests.
struct RunConfig {
  Task task = Task::kBandwidthExtension;
  int sample_rate = 44100;
  StftParams stft;
  double rho = 0.25;
  double beta_max = 1.0;
  double sigma_fill = 1.0;
  SamplerConfig sampler;
  // 0 selects the checkpoint window and half of it respectively.
  int window_frames = 0;
  int window_hop = 0;
  std::vector<std::string> checkpoints;
  // Reference waveform for the oracle denoiser (testing only).
  std::string oracle_ref;
  uint64_t seed = 0;
  double cutoff_hz = 4000.0;
  double gap_ms = 500.0;
  double period_s = 5.0;
  bool pcm16 = false;
  ResampleQuality resample;
  TrainOptions train;
  EvalOptions eval;
};

nlohmann::ordered_json ToJson(const RunConfig& cfg);
// Missing keys keep the values already in `cfg`; unknown keys throw.
void MergeJson(const nlohmann::json& j, RunConfig& cfg);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Range checks. Task-specific fields (cutoffs) are checked only for the
// commands that use them; an empty command checks everything. Throws
// UsageError.
void ValidateRunConfig(const RunConfig& cfg, const std::string& command = "");

}  // namespace sbrestore::cli

#endif  // SBRESTORE_CLI_RUN_CONFIG_H_
