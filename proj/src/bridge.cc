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

#include "sbrestore/bridge.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbrestore {
namespace {

void CheckMaskShape(const FactorizedSpec& x, const MaskSpec& mask) {
  if (mask.num_subbands() != x.num_subbands() ||
      mask.num_frames() != x.num_frames()) {
    throw std::invalid_argument("mask shape does not match spectrogram");
  }
}

}  // namespace

FactorizedSpec Degrade(const FactorizedSpec& x0, const MaskSpec& mask,
                       double sigma_fill, Rng& rng) {
  CheckMaskShape(x0, mask);
  if (!(sigma_fill >= 0.0)) {
    throw std::invalid_argument("sigma_fill must be non-negative");
  }
  FactorizedSpec x1 = x0;
  // Draw order is channel-major over masked cells in column order, which
  // keeps the output a pure function of the seed.
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < x0.num_frames(); ++j) {
      for (int i = 0; i < x0.num_subbands(); ++i) {
        if (mask(i, j)) x1.ch[k](i, j) = sigma_fill * rng.Normal();
      }
    }
  }
  return x1;
}

PosteriorMoments PosteriorCoefficients(const BridgeSchedule& schedule,
                                       double t) {
  const double s2 = schedule.Sigma2(t);
  const double sb2 = schedule.SigmaBar2(t);
  const double total = s2 + sb2;
  return {sb2 / total, s2 / total, sb2 * s2 / total};
}

FactorizedSpec PosteriorSample(const BridgeSchedule& schedule,
                               const FactorizedSpec& x0,
                               const FactorizedSpec& x1, double t, Rng& rng) {
  if (!x0.SameShape(x1)) throw std::invalid_argument("shape mismatch");
  const PosteriorMoments m = PosteriorCoefficients(schedule, t);
  if (t <= 0.0) return x0;
  if (t >= 1.0) return x1;
  const double stddev = std::sqrt(m.variance);
  FactorizedSpec xt = x0;
  for (int k = 0; k < 3; ++k) {
    xt.ch[k] = m.mean_weight_x0 * x0.ch[k] + m.mean_weight_x1 * x1.ch[k] +
               rng.NormalPlane(x0.num_subbands(), x0.num_frames(), stddev);
  }
  return xt;
}

FactorizedSpec TrainingTarget(const BridgeSchedule& schedule,
                              const FactorizedSpec& x_t,
                              const FactorizedSpec& x0, double t) {
  const double sigma = schedule.Sigma(t);
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("training target undefined at t = 0");
  }
  return (x_t - x0) * (1.0 / sigma);
}

MaskedError MaskedSquaredError(const FactorizedSpec& pred,
                               const FactorizedSpec& target,
                               const MaskSpec& mask, int max_subband) {
  if (!pred.SameShape(target)) throw std::invalid_argument("shape mismatch");
  CheckMaskShape(pred, mask);
  const int rows = max_subband >= 0
                       ? std::min(max_subband + 1, pred.num_subbands())
                       : pred.num_subbands();
  MaskedError err;
  for (int j = 0; j < pred.num_frames(); ++j) {
    for (int i = 0; i < rows; ++i) {
      if (!mask(i, j)) continue;
      for (int k = 0; k < 3; ++k) {
        const double d = pred.ch[k](i, j) - target.ch[k](i, j);
        err.sum_squares += d * d;
      }
      err.elements += 3;
    }
  }
  return err;
}

double MaskedLoss(const FactorizedSpec& pred, const FactorizedSpec& target,
                  const MaskSpec& mask, int max_subband) {
  return MaskedSquaredError(pred, target, mask, max_subband).Mean();
}

}  // namespace sbrestore
