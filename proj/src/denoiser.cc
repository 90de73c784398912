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

#include "sbrestore/denoiser.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbrestore {

OracleDenoiser::OracleDenoiser(FactorizedSpec x0_ref, BridgeSchedule schedule)
    : x0_ref_(std::move(x0_ref)), schedule_(schedule) {}

FactorizedSpec OracleDenoiser::Evaluate(const FactorizedSpec& x_t, double t,
                                        const PatchLocation& where) const {
  const double sigma = schedule_.Sigma(t);
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("oracle denoiser undefined at t = 0");
  }
  if (x_t.num_subbands() != x0_ref_.num_subbands()) {
    throw std::invalid_argument("oracle reference has a different subband "
                                "count");
  }
  const int ref_frames = x0_ref_.num_frames();
  const double inv_sigma = 1.0 / sigma;
  FactorizedSpec out = x_t;
  for (int j = 0; j < x_t.num_frames(); ++j) {
    int src = where.offset + j;
    if (where.period > 0) src %= where.period;
    if (src < 0 || src >= ref_frames) {
      throw std::out_of_range("patch frame outside oracle reference");
    }
    for (int k = 0; k < 3; ++k) {
      out.ch[k].col(j) = (x_t.ch[k].col(j) - x0_ref_.ch[k].col(src)) *
                         inv_sigma;
    }
  }
  return out;
}

std::vector<TimeInterval> PartitionIntervals(int count) {
  switch (count) {
    case 1:
      return {{0.0, 1.0}};
    case 2:
      return {{0.0, 0.5}, {0.5, 1.0}};
    case 4: {
      const double b = std::pow(2.0, -4.0 / 3.0);
      return {{0.0, b}, {b, 0.5}, {0.5, 1.0 - b}, {1.0 - b, 1.0}};
    }
    default:
      throw std::invalid_argument("partition count must be 1, 2 or 4, got " +
                                  std::to_string(count));
  }
}

PartitionRouter::PartitionRouter(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) return;
  if (entries_.front().first.lo != 0.0 || entries_.back().first.hi != 1.0) {
    throw std::invalid_argument("router intervals must cover (0, 1]");
  }
  for (size_t k = 0; k < entries_.size(); ++k) {
    const TimeInterval& iv = entries_[k].first;
    if (!(iv.hi > iv.lo)) throw std::invalid_argument("empty interval");
    if (k > 0 && entries_[k - 1].first.hi != iv.lo) {
      throw std::invalid_argument("router intervals must be contiguous");
    }
    if (entries_[k].second == nullptr) {
      throw std::invalid_argument("router entry without a denoiser");
    }
  }
}

int PartitionRouter::RouteIndex(double t) const {
  if (entries_.empty()) throw std::logic_error("empty partition router");
  if (!(t > 0.0 && t <= 1.0)) {
    throw std::invalid_argument("router time must lie in (0, 1]");
  }
  for (size_t k = 0; k < entries_.size(); ++k) {
    if (entries_[k].first.Contains(t)) return static_cast<int>(k);
  }
  throw std::logic_error("router intervals do not cover t");
}

const Denoiser& PartitionRouter::Route(double t) const {
  return *entries_[RouteIndex(t)].second;
}

FactorizedSpec PartitionRouter::Evaluate(const FactorizedSpec& x_t, double t,
                                         const PatchLocation& where) const {
  return Route(t).Evaluate(x_t, t, where);
}

int PartitionRouter::window_frames() const {
  int w = 0;
  for (const auto& [interval, d] : entries_) {
    const int dw = d->window_frames();
    if (dw > 0) w = w == 0 ? dw : std::min(w, dw);
  }
  return w;
}

}  // namespace sbrestore
