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

#ifndef SBRESTORE_TESTS_TEST_UTIL_H_
#define SBRESTORE_TESTS_TEST_UTIL_H_

#include <cmath>
#include <numbers>
#include <vector>

#include "sbrestore/factorized.h"
#include "sbrestore/rng.h"
#include "sbrestore/stft.h"

namespace sbrestore::testing {

inline std::vector<double> Sine(int n, double hz, int sr, double amp = 0.5,
                                double phase = 0.0) {
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) {
    x[k] = amp * std::sin(2.0 * std::numbers::pi * hz * k / sr + phase);
  }
  return x;
}

inline std::vector<double> Noise(int n, uint64_t seed, double std = 0.3) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = std * rng.Normal();
  return x;
}

inline FactorizedSpec RandomSpec(int n, int w, Rng& rng, double rho = 0.25) {
  FactorizedSpec x = FactorizedSpec::Zero(n, w, rho);
  for (Plane& c : x.ch) c = rng.NormalPlane(n, w);
  return x;
}

inline double MaxAbsDiff(const FactorizedSpec& a, const FactorizedSpec& b) {
  double m = 0.0;
  for (int k = 0; k < 3; ++k) m = std::max(m, (a.ch[k] - b.ch[k]).abs().maxCoeff());
  return m;
}

inline double MaxAbsDiff(const std::vector<double>& a,
                         const std::vector<double>& b) {
  double m = 0.0;
  for (size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline bool BitIdentical(const FactorizedSpec& a, const FactorizedSpec& b) {
  for (int k = 0; k < 3; ++k) {
    if (a.ch[k].rows() != b.ch[k].rows() || a.ch[k].cols() != b.ch[k].cols()) {
      return false;
    }
    if ((a.ch[k] != b.ch[k]).any()) return false;
  }
  return true;
}

}  // namespace sbrestore::testing

#endif  // SBRESTORE_TESTS_TEST_UTIL_H_
