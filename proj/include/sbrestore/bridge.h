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

#ifndef SBRESTORE_BRIDGE_H_
#define SBRESTORE_BRIDGE_H_

#include <cstdint>

#include "sbrestore/factorized.h"
#include "sbrestore/mask.h"
#include "sbrestore/rng.h"
#include "sbrestore/schedule.h"

namespace sbrestore {

// Smallest diffusion time drawn for training; the target divides by sigma_t.
inline constexpr double kMinTrainTime = 1e-4;

// Degraded endpoint X1 = X0 outside the mask, N(0, sigma_fill^2) inside, in
// all three channels.
FactorizedSpec Degrade(const FactorizedSpec& x0, const MaskSpec& mask,
                       double sigma_fill, Rng& rng);

// Draw from q(X_t | X0, X1): mean (sb2 X0 + s2 X1) / (sb2 + s2), variance
// sb2 s2 / (sb2 + s2) per cell, with s2 = sigma^2(t), sb2 = sigma_bar^2(t).
// At t = 0 and t = 1 the endpoints are returned unchanged.
FactorizedSpec PosteriorSample(const BridgeSchedule& schedule,
                               const FactorizedSpec& x0,
                               const FactorizedSpec& x1, double t, Rng& rng);

struct PosteriorMoments {
  double mean_weight_x0;
  double mean_weight_x1;
  double variance;
};
PosteriorMoments PosteriorCoefficients(const BridgeSchedule& schedule,
                                       double t);

// (x_t - x0) / sigma(t). Throws std::invalid_argument when sigma(t) == 0.
FactorizedSpec TrainingTarget(const BridgeSchedule& schedule,
                              const FactorizedSpec& x_t,
                              const FactorizedSpec& x0, double t);

struct MaskedError {
  double sum_squares = 0.0;
  // Tensor elements included, i.e. 3 per masked (subband, frame) cell.
  int64_t elements = 0;

  double Mean() const { return elements > 0 ? sum_squares / elements : 0.0; }
};

// Sum of squared differences over masked cells. When `max_subband` >= 0 the
// mask is and-combined with a frequency mask keeping subbands <= max_subband.
MaskedError MaskedSquaredError(const FactorizedSpec& pred,
                               const FactorizedSpec& target,
                               const MaskSpec& mask, int max_subband = -1);

// Mean squared error over the masked elements (0 when nothing is masked).
double MaskedLoss(const FactorizedSpec& pred, const FactorizedSpec& target,
                  const MaskSpec& mask, int max_subband = -1);

}  // namespace sbrestore

#endif  // SBRESTORE_BRIDGE_H_
