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

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "test_util.h"

namespace sbrestore {
namespace {

using testing::BitIdentical;
using testing::MaxAbsDiff;
using testing::RandomSpec;

MaskSpec AllTrue(int n, int w) {
  MaskSpec m = MaskSpec::None(n, w);
  m.cells.setConstant(true);
  return m;
}

TEST(DegradeTest, EmptyMaskIsIdentity) {
  Rng rng(1);
  const FactorizedSpec x0 = RandomSpec(20, 12, rng);
  const FactorizedSpec x1 = Degrade(x0, MaskSpec::None(20, 12), 1.0, rng);
  EXPECT_TRUE(BitIdentical(x0, x1));
}

TEST(DegradeTest, FullMaskHasUnitGaussianMoments) {
  const int n = 64, w = 32;
  const double count = 3.0 * n * w;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    const FactorizedSpec x0 = RandomSpec(n, w, rng);
    const FactorizedSpec x1 = Degrade(x0, AllTrue(n, w), 1.0, rng);
    double sum = 0.0, sq = 0.0;
    for (const Plane& c : x1.ch) {
      sum += c.sum();
      sq += c.square().sum();
    }
    const double mean = sum / count;
    const double var = sq / count - mean * mean;
    EXPECT_LT(std::abs(mean), 3.0 / std::sqrt(count)) << "seed " << seed;
    // Standard error of a variance estimate is sqrt(2 / count).
    EXPECT_LT(std::abs(var - 1.0), 4.0 * std::sqrt(2.0 / count));
  }
}

TEST(DegradeTest, ZeroFillAndUntouchedCells) {
  Rng rng(3);
  const FactorizedSpec x0 = RandomSpec(30, 10, rng);
  const MaskSpec m = MaskSpec::BandwidthExtension(30, 10, 11);
  const FactorizedSpec x1 = Degrade(x0, m, 0.0, rng);
  for (int k = 0; k < 3; ++k) {
    EXPECT_TRUE((x1.ch[k].bottomRows(18) == 0.0).all());
    EXPECT_TRUE((x1.ch[k].topRows(12) == x0.ch[k].topRows(12)).all());
  }
  EXPECT_THROW(Degrade(x0, m, -1.0, rng), std::invalid_argument);
  EXPECT_THROW(Degrade(x0, MaskSpec::None(30, 9), 1.0, rng),
               std::invalid_argument);
}

TEST(PosteriorTest, MidpointCoefficients) {
  const BridgeSchedule s(1.0);
  const PosteriorMoments m = PosteriorCoefficients(s, 0.5);
  EXPECT_NEAR(m.mean_weight_x0, 0.5, 1e-15);
  EXPECT_NEAR(m.mean_weight_x1, 0.5, 1e-15);
  EXPECT_NEAR(m.variance, 1.0 / 48.0, 1e-15);
}

TEST(PosteriorTest, MonteCarloMomentsAtPointThree) {
  const BridgeSchedule s(1.0);
  const double t = 0.3;
  // Independent closed form from the integrals of beta.
  const double s2 = t * t * t / 3.0;
  const double sb2 = 1.0 / 12.0 - s2;
  const double x0 = 0.7, x1 = -1.3;
  const double mu = (sb2 * x0 + s2 * x1) / (s2 + sb2);
  const double var = s2 * sb2 / (s2 + sb2);

  FactorizedSpec a = FactorizedSpec::Zero(1, 1), b = FactorizedSpec::Zero(1, 1);
  for (int k = 0; k < 3; ++k) {
    a.ch[k](0, 0) = x0;
    b.ch[k](0, 0) = x1;
  }
  Rng rng(21);
  const int draws = 100000;
  double sum = 0.0, sq = 0.0;
  for (int d = 0; d < draws; ++d) {
    const double v = PosteriorSample(s, a, b, t, rng).ch[0](0, 0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / draws;
  const double emp_var = sq / draws - mean * mean;
  EXPECT_NEAR(mean, mu, 0.01 * std::abs(mu));
  EXPECT_NEAR(emp_var, var, 0.01 * var);
}

TEST(PosteriorTest, Endpoints) {
  const BridgeSchedule s;
  Rng rng(2);
  const FactorizedSpec x0 = RandomSpec(8, 4, rng), x1 = RandomSpec(8, 4, rng);
  EXPECT_TRUE(BitIdentical(PosteriorSample(s, x0, x1, 0.0, rng), x0));
  EXPECT_TRUE(BitIdentical(PosteriorSample(s, x0, x1, 1.0, rng), x1));
  // Tiny t stays within a few standard deviations of x0.
  const FactorizedSpec near = PosteriorSample(s, x0, x1, 1e-4, rng);
  EXPECT_LT(MaxAbsDiff(near, x0), 1e-5);
}

TEST(PosteriorTest, EqualEndpointsKeepTheMean) {
  const BridgeSchedule s;
  Rng rng(5);
  const FactorizedSpec x = RandomSpec(64, 64, rng);
  const FactorizedSpec xt = PosteriorSample(s, x, x, 0.5, rng);
  const double stddev = std::sqrt(1.0 / 48.0);
  double mean_dev = 0.0;
  for (int k = 0; k < 3; ++k) mean_dev += (xt.ch[k] - x.ch[k]).sum();
  mean_dev /= 3.0 * 64 * 64;
  EXPECT_LT(std::abs(mean_dev), 4.0 * stddev / std::sqrt(3.0 * 64 * 64));
}

TEST(TrainingTargetTest, Examples) {
  const BridgeSchedule s;
  Rng rng(8);
  const FactorizedSpec x0 = RandomSpec(6, 5, rng);
  const FactorizedSpec zero = TrainingTarget(s, x0, x0, 0.4);
  for (const Plane& c : zero.ch) EXPECT_EQ(c.abs().maxCoeff(), 0.0);

  const FactorizedSpec g = RandomSpec(6, 5, rng);
  const double t = 0.77;
  const FactorizedSpec xt = x0 + g * s.Sigma(t);
  EXPECT_LT(MaxAbsDiff(TrainingTarget(s, xt, x0, t), g), 1e-12);

  FactorizedSpec shifted = x0;
  for (Plane& c : shifted.ch) c += 0.2041;
  const FactorizedSpec one = TrainingTarget(s, shifted, x0, 0.5);
  for (const Plane& c : one.ch) {
    EXPECT_NEAR(c.mean(), 1.0, 1e-3);
  }
  EXPECT_THROW(TrainingTarget(s, xt, x0, 0.0), std::invalid_argument);
}

TEST(MaskedLossTest, HandExamples) {
  Rng rng(4);
  const FactorizedSpec a = RandomSpec(10, 7, rng);
  const FactorizedSpec b = RandomSpec(10, 7, rng);
  EXPECT_EQ(MaskedLoss(a, a, AllTrue(10, 7)), 0.0);
  EXPECT_EQ(MaskedLoss(a, b, MaskSpec::None(10, 7)), 0.0);

  FactorizedSpec c = a;
  c.ch[1](4, 2) += 3.0;
  MaskSpec one = MaskSpec::None(10, 7);
  one.cells(4, 2) = true;
  const MaskedError e = MaskedSquaredError(c, a, one);
  EXPECT_NEAR(e.sum_squares, 9.0, 1e-12);
  EXPECT_EQ(e.elements, 3);
  EXPECT_NEAR(e.Mean(), 3.0, 1e-12);
}

TEST(MaskedLossTest, IgnoresUnmaskedCells) {
  Rng rng(6);
  const FactorizedSpec pred = RandomSpec(16, 8, rng);
  const FactorizedSpec target = RandomSpec(16, 8, rng);
  const MaskSpec m = MaskSpec::Inpainting(16, 8, {{2, 4}});
  const double base = MaskedLoss(pred, target, m);
  FactorizedSpec moved = pred;
  for (Plane& c : moved.ch) {
    c.leftCols(2) += rng.NormalPlane(16, 2, 10.0);
    c.rightCols(3) -= 5.0;
  }
  EXPECT_EQ(MaskedLoss(moved, target, m), base);
}

TEST(MaskedLossTest, FrequencyLimit) {
  Rng rng(7);
  const FactorizedSpec a = RandomSpec(16, 4, rng);
  FactorizedSpec b = a;
  for (Plane& c : b.ch) c.bottomRows(6) += 1.0;  // rows 10..15
  const MaskSpec all = AllTrue(16, 4);
  EXPECT_EQ(MaskedLoss(b, a, all, 9), 0.0);
  EXPECT_GT(MaskedLoss(b, a, all, 10), 0.0);
  EXPECT_EQ(MaskedSquaredError(b, a, all, 9).elements, 3 * 10 * 4);
}

}  // namespace
}  // namespace sbrestore
