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

#ifndef SBRESTORE_DENOISER_H_
#define SBRESTORE_DENOISER_H_

#include <memory>
#include <utility>
#include <vector>

#include "sbrestore/factorized.h"
#include "sbrestore/schedule.h"

namespace sbrestore {

// Where a patch sits inside the full input: patch frame j is frame
// (offset + j) mod period of the full tensor. period == 0 means the patch is
// the full tensor. Learned denoisers ignore it.
struct PatchLocation {
  int offset = 0;
  int period = 0;
};

// Noise predictor eps(X_t, t). Implementations must be deterministic and
// safe to evaluate concurrently.
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  // Returns a tensor of the same shape as `x_t`.
  virtual FactorizedSpec Evaluate(const FactorizedSpec& x_t, double t,
                                  const PatchLocation& where = {}) const = 0;

  // Widest input in frames the denoiser accepts; 0 means unbounded.
  virtual int window_frames() const = 0;
};

// Returns (x_t - x0_ref) / sigma(t), the exact minimizer of the training
// objective. Used to validate the sampler independently of learning.
class OracleDenoiser : public Denoiser {
 public:
  OracleDenoiser(FactorizedSpec x0_ref, BridgeSchedule schedule);

  FactorizedSpec Evaluate(const FactorizedSpec& x_t, double t,
                          const PatchLocation& where = {}) const override;
  int window_frames() const override { return 0; }

 private:
  FactorizedSpec x0_ref_;
  BridgeSchedule schedule_;
};

// Half-open diffusion-time interval (lo, hi].
struct TimeInterval {
  double lo = 0.0;
  double hi = 1.0;

  bool Contains(double t) const { return t > lo && t <= hi; }
  bool operator==(const TimeInterval&) const = default;
};

// Interval layouts for 1, 2 or 4 partitions. The 4-way split uses
// boundaries 2^(-4/3), 1/2 and 1 - 2^(-4/3). Throws for other counts.
std::vector<TimeInterval> PartitionIntervals(int count);

// Dispatches each call to the denoiser whose interval contains t. Shared
// boundary points belong to the lower interval.
class PartitionRouter : public Denoiser {
 public:
  using Entry = std::pair<TimeInterval, std::shared_ptr<const Denoiser>>;

  // Intervals must be ordered, start at 0, end at 1 and share endpoints.
  explicit PartitionRouter(std::vector<Entry> entries);

  // Throws std::invalid_argument outside (0, 1] and std::logic_error when
  // the router is empty.
  const Denoiser& Route(double t) const;
  int RouteIndex(double t) const;

  FactorizedSpec Evaluate(const FactorizedSpec& x_t, double t,
                          const PatchLocation& where = {}) const override;
  int window_frames() const override;

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

}  // namespace sbrestore

#endif  // SBRESTORE_DENOISER_H_
