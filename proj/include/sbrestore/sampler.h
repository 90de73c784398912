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

#ifndef SBRESTORE_SAMPLER_H_
#define SBRESTORE_SAMPLER_H_

#include <vector>

#include "sbrestore/denoiser.h"
#include "sbrestore/factorized.h"
#include "sbrestore/mask.h"
#include "sbrestore/rng.h"
#include "sbrestore/schedule.h"

namespace sbrestore {

struct SamplerConfig {
  int num_steps = 50;
  // Use the posterior mean at every step instead of sampling.
  bool deterministic = false;
  // After each step, overwrite unmasked cells with the degraded endpoint.
  bool clamp_known_region = true;
  // Worker threads for MultiDiffusion window evaluation.
  int num_threads = 1;
};

// X0 estimate x_t - sigma(t) * eps_hat.
FactorizedSpec PredictX0(const BridgeSchedule& schedule,
                         const FactorizedSpec& x_t,
                         const FactorizedSpec& eps_hat, double t);

// Posterior p(X_{t-dt} | X0_hat, X_t) of the bridge:
//   mean = (d * X0_hat + s2_prev * X_t) / s2_t,
//   var  = d * s2_prev / s2_t,
// with s2 = sigma^2 and d = s2_t - s2_prev.
struct ReverseStepCoefficients {
  double weight_x0;
  double weight_xt;
  double variance;
};
ReverseStepCoefficients ReverseCoefficients(const BridgeSchedule& schedule,
                                            double t, double dt);

// One reverse step from t to t - dt. Requires 0 <= t - dt <= t <= 1 and
// t > 0. Draws one normal per element unless `deterministic`.
FactorizedSpec ReverseStep(const BridgeSchedule& schedule,
                           const FactorizedSpec& x_t,
                           const FactorizedSpec& x0_hat, double t, double dt,
                           Rng& rng, bool deterministic);

// Runs the reverse recursion from t = 1 to 0 in num_steps uniform steps.
// Throws std::invalid_argument on shape mismatch or when the input is wider
// than the denoiser window (use RestoreLong).
FactorizedSpec Restore(const BridgeSchedule& schedule,
                       const FactorizedSpec& x1, const MaskSpec& mask,
                       const Denoiser& denoiser, const SamplerConfig& cfg,
                       Rng& rng);

// Sliding-window decomposition of a long spectrogram. Windows start at
// 0, hop, 2 * hop, ... until one reaches the last frame; the final window is
// completed with `padding` frames copied cyclically from the start. Inputs no
// wider than the window get one window of the input's own width.
struct WindowPlan {
  int full_width = 0;
  int window = 0;
  int hop = 0;
  std::vector<int> offsets;
  // Number of windows covering each original frame.
  std::vector<int> coverage;
  int padding = 0;

  int window_count() const { return static_cast<int>(offsets.size()); }
  int effective_window() const {
    return full_width < window ? full_width : window;
  }
};

// Throws std::invalid_argument unless full_width >= 1 and 0 < hop <= window.
WindowPlan PlanWindows(int full_width, int window, int hop);

// Denoiser output on the full input: per-window outputs summed and divided
// elementwise by the coverage count. Outputs on padded frames are dropped.
// Window outputs are merged in offset order whatever the thread count.
FactorizedSpec MultiDiffusionEval(const FactorizedSpec& x_t_full, double t,
                                  const Denoiser& denoiser,
                                  const WindowPlan& plan, int num_threads = 1);

// Restore with MultiDiffusionEval in place of direct denoiser calls. Noise is
// drawn once per step over the full tensor.
FactorizedSpec RestoreLong(const BridgeSchedule& schedule,
                           const FactorizedSpec& x1_full, const MaskSpec& mask,
                           const Denoiser& denoiser, const SamplerConfig& cfg,
                           const WindowPlan& plan, Rng& rng);

}  // namespace sbrestore

#endif  // SBRESTORE_SAMPLER_H_
