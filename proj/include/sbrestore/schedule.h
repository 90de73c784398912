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

#ifndef SBRESTORE_SCHEDULE_H_
#define SBRESTORE_SCHEDULE_H_

namespace sbrestore {

// Symmetric bridge noise schedule beta(t) = beta_max * min(t, 1 - t)^2 and
// its integrals sigma^2(t) = int_0^t beta, sigma_bar^2(t) = int_t^1 beta,
// both in closed form. All accessors throw std::out_of_range for t outside
// [0, 1].
class BridgeSchedule {
 public:
  explicit BridgeSchedule(double beta_max = 1.0);

  double beta_max() const { return beta_max_; }

  double Beta(double t) const;
  double Sigma2(double t) const;
  double SigmaBar2(double t) const;
  double Sigma(double t) const;

  // sigma^2(1); equals Sigma2(t) + SigmaBar2(t) for every t.
  double Total() const { return beta_max_ / 12.0; }

 private:
  double beta_max_;
};

}  // namespace sbrestore

#endif  // SBRESTORE_SCHEDULE_H_
