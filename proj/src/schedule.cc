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

#include "sbrestore/schedule.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbrestore {
namespace {

void CheckTime(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::out_of_range("diffusion time " + std::to_string(t) +
                            " outside [0, 1]");
  }
}

}  // namespace

BridgeSchedule::BridgeSchedule(double beta_max) : beta_max_(beta_max) {
  if (!(beta_max > 0.0) || !std::isfinite(beta_max)) {
    throw std::invalid_argument("beta_max must be positive");
  }
}

double BridgeSchedule::Beta(double t) const {
  CheckTime(t);
  const double m = std::min(t, 1.0 - t);
  return beta_max_ * m * m;
}

double BridgeSchedule::Sigma2(double t) const {
  CheckTime(t);
  if (t <= 0.5) return beta_max_ * t * t * t / 3.0;
  const double u = 1.0 - t;
  return beta_max_ * (1.0 / 12.0 - u * u * u / 3.0);
}

double BridgeSchedule::SigmaBar2(double t) const {
  CheckTime(t);
  // Mirror image of Sigma2; evaluated directly to avoid cancellation near 1.
  if (t >= 0.5) {
    const double u = 1.0 - t;
    return beta_max_ * u * u * u / 3.0;
  }
  return beta_max_ * (1.0 / 12.0 - t * t * t / 3.0);
}

double BridgeSchedule::Sigma(double t) const { return std::sqrt(Sigma2(t)); }

}  // namespace sbrestore
