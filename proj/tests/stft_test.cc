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

#include "sbrestore/stft.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace sbrestore {
namespace {

using testing::MaxAbsDiff;
using testing::Noise;
using testing::Sine;

// Direct evaluation: reflect-pad by fft/2, periodic Hann centered in the
// frame, O(N^2) DFT.
ComplexSpec NaiveStft(const std::vector<double>& x, const StftParams& p) {
  const int pad = p.fft_size / 2;
  const int len = static_cast<int>(x.size());
  auto at = [&](int k) {
    if (k < 0) k = -k;
    if (k >= len) k = 2 * (len - 1) - k;
    return x[k];
  };
  std::vector<double> win(p.fft_size, 0.0);
  const int off = (p.fft_size - p.win_length) / 2;
  for (int k = 0; k < p.win_length; ++k) {
    win[off + k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / p.win_length);
  }
  const int frames = 1 + len / p.hop;
  const int bins = p.fft_size / 2 + 1;
  ComplexSpec s{Plane::Zero(bins, frames), Plane::Zero(bins, frames)};
  for (int j = 0; j < frames; ++j) {
    for (int i = 0; i < bins; ++i) {
      std::complex<double> acc = 0.0;
      for (int k = 0; k < p.fft_size; ++k) {
        const double v = at(j * p.hop - pad + k) * win[k];
        acc += v * std::polar(1.0, -2.0 * std::numbers::pi * i * k / p.fft_size);
      }
      s.re(i, j) = acc.real();
      s.im(i, j) = acc.imag();
    }
  }
  return s;
}

TEST(StftTest, PaperSegmentHas256Frames) {
  const StftParams p;
  EXPECT_EQ(NumFrames(130560, p), 256);
  const std::vector<double> x(130560, 0.0);
  const ComplexSpec s = Stft(x, p);
  EXPECT_EQ(s.num_frames(), 256);
  EXPECT_EQ(s.num_subbands(), 1025);
}

TEST(StftTest, MinSamplesForFramesInvertsNumFrames) {
  const StftParams p;
  for (int w : {2, 64, 256, 1000}) {
    EXPECT_EQ(NumFrames(MinSamplesForFrames(w, p), p), w);
    EXPECT_EQ(NumFrames(MinSamplesForFrames(w, p) - 1, p), w - 1);
  }
}

TEST(StftTest, ZeroWaveformGivesZeroSpectrogram) {
  const std::vector<double> x(10000, 0.0);
  const ComplexSpec s = Stft(x, StftParams{});
  EXPECT_EQ(s.re.abs().maxCoeff(), 0.0);
  EXPECT_EQ(s.im.abs().maxCoeff(), 0.0);
}

TEST(StftTest, SineEnergyLandsInItsSubband) {
  const StftParams p;
  const int sr = 44100;
  const ComplexSpec s = Stft(Sine(sr, 440.0, sr), p);
  Eigen::Index peak;
  s.Magnitude().rowwise().mean().maxCoeff(&peak);
  EXPECT_EQ(peak, static_cast<int>(std::lround(440.0 * p.fft_size / sr)));
}

TEST(StftTest, MatchesDirectDft) {
  for (const StftParams p : {StftParams{64, 64, 16}, StftParams{64, 48, 12},
                             StftParams{32, 32, 8}}) {
    const std::vector<double> x = Noise(301, 5);
    const ComplexSpec fast = Stft(x, p);
    const ComplexSpec slow = NaiveStft(x, p);
    ASSERT_EQ(fast.num_frames(), slow.num_frames());
    EXPECT_LT((fast.re - slow.re).abs().maxCoeff(), 1e-10);
    EXPECT_LT((fast.im - slow.im).abs().maxCoeff(), 1e-10);
  }
}

TEST(StftTest, SineRoundTrip) {
  const StftParams p;
  const std::vector<double> x = Sine(44100, 440.0, 44100);
  EXPECT_LT(MaxAbsDiff(Istft(Stft(x, p), p, 44100), x), 1e-4);
}

TEST(StftTest, NoiseRoundTrip) {
  const StftParams p;
  const std::vector<double> x = Noise(50000, 11);
  EXPECT_LT(MaxAbsDiff(Istft(Stft(x, p), p, 50000), x), 1e-4);
}

TEST(StftTest, RoundTripHoldsForRandomLengthsAndParams) {
  Rng rng(3);
  const StftParams params[] = {StftParams{}, StftParams{256, 256, 64},
                               StftParams{512, 400, 100}, StftParams{128, 128, 32}};
  for (const StftParams& p : params) {
    for (int trial = 0; trial < 5; ++trial) {
      const int len = rng.UniformInt(p.win_length, 6 * p.fft_size);
      const std::vector<double> x = Noise(len, 100 + trial);
      EXPECT_LT(MaxAbsDiff(Istft(Stft(x, p), p, len), x), 1e-4)
          << "fft " << p.fft_size << " len " << len;
    }
  }
}

TEST(StftTest, ZeroSpectrogramGivesZeroWaveform) {
  const StftParams p;
  const ComplexSpec s{Plane::Zero(1025, 20), Plane::Zero(1025, 20)};
  const std::vector<double> y = Istft(s, p, MinSamplesForFrames(20, p));
  for (double v : y) EXPECT_EQ(v, 0.0);
}

TEST(StftTest, RejectsShortInputAndBadShapes) {
  const StftParams p;
  EXPECT_THROW(Stft(std::vector<double>(2047, 0.0), p), std::invalid_argument);
  const ComplexSpec bad{Plane::Zero(1000, 10), Plane::Zero(1000, 10)};
  EXPECT_THROW(Istft(bad, p, 4608), std::invalid_argument);
  const ComplexSpec ok{Plane::Zero(1025, 10), Plane::Zero(1025, 10)};
  EXPECT_THROW(Istft(ok, p, 100000), std::invalid_argument);
}

TEST(StftTest, ValidateRejectsInconsistentParams) {
  EXPECT_THROW((StftParams{1024, 2048, 512}.Validate()), std::invalid_argument);
  EXPECT_THROW((StftParams{2048, 2048, 4096}.Validate()), std::invalid_argument);
  EXPECT_THROW((StftParams{2048, 2048, 0}.Validate()), std::invalid_argument);
  EXPECT_NO_THROW(StftParams{}.Validate());
}

TEST(StftTest, BandAverageOfUnitMagnitudeIsOne) {
  const StftParams p;
  ComplexSpec s{Plane::Constant(1025, 8, 0.6), Plane::Constant(1025, 8, 0.8)};
  const std::vector<std::pair<double, double>> bands = {
      {0, 2000}, {2000, 4000}, {4000, 22050}};
  for (double v : BandAverageMagnitude(s, p, 44100, bands)) {
    EXPECT_NEAR(v, 1.0, 1e-12);
  }
  s.re.setZero();
  s.im.setZero();
  for (double v : BandAverageMagnitude(s, p, 44100, bands)) EXPECT_EQ(v, 0.0);
}

TEST(StftTest, FiveKilohertzSineDominatesItsBand) {
  const StftParams p;
  const int sr = 44100;
  const ComplexSpec s = Stft(Sine(sr, 5000.0, sr), p);
  std::vector<std::pair<double, double>> bands;
  for (double lo = 0; lo < sr / 2.0; lo += 2000) {
    bands.push_back({lo, std::min(lo + 2000, sr / 2.0)});
  }
  const std::vector<double> avg = BandAverageMagnitude(s, p, sr, bands);
  for (size_t b = 0; b < avg.size(); ++b) {
    if (b == 2) continue;
    EXPECT_GT(avg[2], avg[b]) << "band " << b;
  }
}

TEST(StftTest, EmptyBandThrows) {
  const StftParams p;
  const ComplexSpec s{Plane::Zero(1025, 4), Plane::Zero(1025, 4)};
  const std::vector<std::pair<double, double>> bands = {{1000.0, 1001.0}};
  EXPECT_THROW(BandAverageMagnitude(s, p, 44100, bands), std::invalid_argument);
}

}  // namespace
}  // namespace sbrestore
