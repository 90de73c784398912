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

#ifndef SBRESTORE_RNG_H_
#define SBRESTORE_RNG_H_

#include <cstdint>
#include <random>

#include "sbrestore/stft.h"

namespace sbrestore {

// Seeded generator owned by the caller. Not shared between threads.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double Normal() { return normal_(engine_); }
  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  // Inclusive on both ends.
  int UniformInt(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  bool Bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }

  Plane NormalPlane(int rows, int cols, double stddev = 1.0) {
    Plane p(rows, cols);
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = stddev * Normal();
    return p;
  }

  // Independent child stream, e.g. one per dataset item.
  Rng Fork() { return Rng(engine_()); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace sbrestore

#endif  // SBRESTORE_RNG_H_
