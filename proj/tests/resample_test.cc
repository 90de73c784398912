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

#include "sbrestore/resample.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "test_util.h"

namespace sbrestore {
namespace {

double MaxErrorInterior(const std::vector<double>& y, double hz, int sr,
                        double amp, int margin) {
  double worst = 0.0;
  for (int n = margin; n < static_cast<int>(y.size()) - margin; ++n) {
    const double want = amp * std::sin(2.0 * std::numbers::pi * hz * n / sr);
    worst = std::max(worst, std::abs(y[n] - want));
  }
  return worst;
}

TEST(ResampleTest, IdentityAndLength) {
  const auto x = testing::Noise(1001, 1);
  EXPECT_EQ(Resample(x, 44100, 44100), x);
  EXPECT_EQ(Resample(x, 44100, 22050).size(), 501u);
  EXPECT_EQ(Resample(x, 8000, 44100).size(),
            static_cast<size_t>(std::ceil(1001.0 * 44100 / 8000)));
  EXPECT_THROW(Resample(x, 0, 100), std::invalid_argument);
}

TEST(ResampleTest, PreservesInBandSine) {
  for (auto [from, to] : {std::pair{44100, 16000}, std::pair{16000, 44100},
                          std::pair{48000, 44100}, std::pair{8000, 12000}}) {
    const double hz = 1000.0;
    const auto x = testing::Sine(from, hz, from, 0.5);
    const auto y = Resample(x, from, to);
    EXPECT_LT(MaxErrorInterior(y, hz, to, 0.5, to / 20), 2e-3)
        << from << " -> " << to;
  }
}

TEST(ResampleTest, RemovesAliasedContent) {
  // 7 kHz has no place at 8 kHz output.
  const auto x = testing::Sine(44100, 7000, 44100, 0.5);
  const auto y = Resample(x, 44100, 8000);
  double rms = 0.0;
  for (size_t n = 400; n < y.size() - 400; ++n) rms += y[n] * y[n];
  rms = std::sqrt(rms / (y.size() - 800));
  EXPECT_LT(rms, 1e-3);
}

TEST(ResampleTest, WaveformOverload) {
  Waveform w{testing::Sine(1600, 100, 16000), 16000};
  const Waveform r = Resample(w, 8000);
  EXPECT_EQ(r.sample_rate, 8000);
  EXPECT_EQ(r.size(), 800);
}

}  // namespace
}  // namespace sbrestore
