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

#include "sbrestore/toy_net.h"

#include <cmath>
#include <memory>
#include <stdexcept>

#include <gtest/gtest.h>

#include "test_util.h"

namespace sbrestore {
namespace {

using testing::RandomSpec;

ToyNetConfig SmallConfig() {
  ToyNetConfig cfg;
  cfg.channels = 6;
  cfg.blocks = 2;
  cfg.freq_dilations = {1, 2};
  cfg.embed_hidden = 8;
  cfg.window_frames = 64;
  return cfg;
}

// Random weights everywhere, including the zero-initialized output layer.
ToyNet RandomNet(const ToyNetConfig& cfg, uint64_t seed, double scale = 0.3) {
  ToyNet net(cfg);
  Rng rng(seed);
  for (double& p : net.params()) p = scale * rng.Normal();
  return net;
}

double Dot(const FactorizedSpec& a, const FactorizedSpec& b) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += (a.ch[k] * b.ch[k]).sum();
  return s;
}

TEST(TimeEmbeddingTest, ShapeAndRange) {
  const Eigen::VectorXd e = TimeEmbedding(0.37);
  EXPECT_EQ(e.size(), kTimeEmbeddingDim);
  EXPECT_LE(e.cwiseAbs().maxCoeff(), 1.0);
  const Eigen::VectorXd zero = TimeEmbedding(0.0);
  EXPECT_EQ(zero.head(kTimeEmbeddingDim / 2).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(zero.tail(kTimeEmbeddingDim / 2).minCoeff(), 1.0);
}

TEST(ToyNetTest, GradientMatchesCentralDifferences) {
  ToyNet net = RandomNet(SmallConfig(), 1, 0.2);
  Rng rng(2);
  const FactorizedSpec x = RandomSpec(9, 7, rng);
  const FactorizedSpec r = RandomSpec(9, 7, rng);  // loss = <out, r>
  const double t = 0.42;

  ToyNet::Tape tape;
  net.Forward(x, t, &tape);
  ParamVector grad;
  net.Backward(tape, r, grad);
  ASSERT_EQ(grad.size(), net.params().size());

  const double h = 1e-6;
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int idx = rng.UniformInt(0, static_cast<int>(net.num_params()) - 1);
    const double saved = net.params()[idx];
    net.params()[idx] = saved + h;
    const double up = Dot(net.Forward(x, t), r);
    net.params()[idx] = saved - h;
    const double down = Dot(net.Forward(x, t), r);
    net.params()[idx] = saved;
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max({std::abs(numeric), std::abs(grad[idx]), 1e-6});
    EXPECT_LT(std::abs(numeric - grad[idx]) / denom, 1e-3)
        << "param " << idx << " numeric " << numeric << " analytic "
        << grad[idx];
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(ToyNetTest, GradientAccumulates) {
  ToyNet net = RandomNet(SmallConfig(), 3, 0.2);
  Rng rng(4);
  const FactorizedSpec x = RandomSpec(5, 4, rng);
  const FactorizedSpec r = RandomSpec(5, 4, rng);
  ToyNet::Tape tape;
  net.Forward(x, 0.3, &tape);
  ParamVector once, twice;
  net.Backward(tape, r, once);
  net.Backward(tape, r, twice);
  net.Backward(tape, r, twice);
  for (size_t k = 0; k < once.size(); ++k) {
    ASSERT_NEAR(twice[k], 2.0 * once[k], 1e-12 * (1.0 + std::abs(once[k])));
  }
  ParamVector wrong(3);
  EXPECT_THROW(net.Backward(tape, r, wrong), std::invalid_argument);
}

TEST(ToyNetTest, TemporalShiftEquivariance) {
  const ToyNetConfig cfg = SmallConfig();
  const ToyNet net = RandomNet(cfg, 5, 0.2);
  Rng rng(6);
  const int n = 17, w = 40, shift = 5;
  // Every conv is 3 wide in time, so the receptive radius is 2 + 2 * blocks.
  const int radius = 2 + 2 * cfg.blocks;
  const FactorizedSpec x = RandomSpec(n, w, rng);
  FactorizedSpec xs = x;
  for (int k = 0; k < 3; ++k) {
    xs.ch[k].rightCols(w - shift) = x.ch[k].leftCols(w - shift);
    xs.ch[k].leftCols(shift) = rng.NormalPlane(n, shift);
  }
  const FactorizedSpec a = net.Forward(x, 0.6);
  const FactorizedSpec b = net.Forward(xs, 0.6);
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    for (int j = radius; j + shift < w - radius; ++j) {
      worst = std::max(
          worst, (a.ch[k].col(j) - b.ch[k].col(j + shift)).abs().maxCoeff());
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(ToyNetTest, FrequencyChannelBreaksFrequencySymmetry) {
  const ToyNet net = RandomNet(SmallConfig(), 7, 0.3);
  // Constant input: without frequency conditioning interior rows would match.
  FactorizedSpec x = FactorizedSpec::Zero(33, 9);
  for (Plane& c : x.ch) c.setConstant(0.5);
  const FactorizedSpec y = net.Forward(x, 0.5);
  EXPECT_GT(std::abs(y.ch[0](12, 4) - y.ch[0](20, 4)), 1e-6);
}

TEST(ToyNetTest, OutputShapeAndZeroInit) {
  ToyNet net(SmallConfig());
  Rng rng(8);
  net.InitRandom(rng);
  const FactorizedSpec x = RandomSpec(11, 13, rng);
  const FactorizedSpec y = net.Forward(x, 0.2);
  EXPECT_TRUE(y.SameShape(x));
  for (const Plane& c : y.ch) EXPECT_EQ(c.abs().maxCoeff(), 0.0);
}

TEST(ToyNetTest, DefaultParameterBudget) {
  const ToyNet net{ToyNetConfig{}};
  EXPECT_LE(net.num_params(), 500000);
  int64_t total = 0;
  for (const auto& t : net.layout()) {
    EXPECT_EQ(t.offset, total) << t.name;
    total += t.size;
  }
  EXPECT_EQ(total, net.num_params());
}

TEST(ToyNetTest, RejectsBadConfigs) {
  ToyNetConfig cfg = SmallConfig();
  cfg.channels = 0;
  EXPECT_THROW(ToyNet{cfg}, std::invalid_argument);
  cfg = SmallConfig();
  cfg.freq_dilations = {0};
  EXPECT_THROW(ToyNet{cfg}, std::invalid_argument);
}

TEST(ToyDenoiserTest, EnforcesWindowAndMatchesNet) {
  auto net = std::make_shared<ToyNet>(RandomNet(SmallConfig(), 9));
  const ToyDenoiser d(net);
  EXPECT_EQ(d.window_frames(), 64);
  Rng rng(10);
  const FactorizedSpec x = RandomSpec(7, 64, rng);
  EXPECT_TRUE(testing::BitIdentical(d.Evaluate(x, 0.3), net->Forward(x, 0.3)));
  EXPECT_THROW(d.Evaluate(RandomSpec(7, 65, rng), 0.3), std::invalid_argument);
  // Same input, same output.
  EXPECT_TRUE(testing::BitIdentical(d.Evaluate(x, 0.3), d.Evaluate(x, 0.3)));
}

}  // namespace
}  // namespace sbrestore
