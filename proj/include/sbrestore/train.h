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

#ifndef SBRESTORE_TRAIN_H_
#define SBRESTORE_TRAIN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sbrestore/bridge.h"
#include "sbrestore/denoiser.h"
#include "sbrestore/mask.h"
#include "sbrestore/toy_net.h"

namespace sbrestore {

struct TrainConfig {
  int steps = 2000;
  int batch_size = 1;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Global gradient-norm clip; <= 0 disables.
  double grad_clip = 0.5;
  // t is drawn uniformly from (interval.lo, interval.hi], floored at
  // kMinTrainTime.
  TimeInterval interval;
  // Restrict the loss to subbands at or below each segment's highest active
  // subband (used for the 4-way partition).
  bool frequency_loss_mask = false;
  // Draw mask, t and noise once and reuse them every step. Only useful for
  // memorization checks.
  bool fixed_draws = false;
  double fixed_t = 0.5;
  uint64_t seed = 0;

  DegradationConfig degradation;
  StftParams stft;
  int sample_rate = 8000;
  double beta_max = 1.0;
};

// Mean masked loss of every step.
struct TrainLog {
  std::vector<double> loss;
};

// Highest subband whose peak magnitude over frames reaches `rel_floor` of the
// segment's global peak (0 for silence).
int HighestActiveSubband(const FactorizedSpec& x0, double rel_floor = 1e-4);

// Minimizes the masked bridge objective with Adam. Deterministic for a given
// seed. Throws std::invalid_argument for an empty dataset.
// `on_step(step, loss)` is called after every update when set.
TrainLog TrainToy(ToyNet& net, std::span<const FactorizedSpec> dataset,
                  const TrainConfig& cfg,
                  const std::function<void(int, double)>& on_step = {});

struct PartitionedNet {
  TimeInterval interval;
  ToyNet net;
  TrainLog log;
};

// Pre-trains one network on (0, 1] for `pretrain_steps`, then fine-tunes a
// copy per interval of PartitionIntervals(partitions) for cfg.steps. With a
// single partition this is plain training for pretrain_steps + cfg.steps.
std::vector<PartitionedNet> TrainPartitioned(
    const ToyNetConfig& net_cfg, std::span<const FactorizedSpec> dataset,
    const TrainConfig& cfg, int partitions, int pretrain_steps,
    const std::function<void(int, int, double)>& on_step = {});

}  // namespace sbrestore

#endif  // SBRESTORE_TRAIN_H_
