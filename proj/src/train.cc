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

#include "sbrestore/train.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbrestore {
namespace {

struct Draw {
  const FactorizedSpec* x0;
  MaskSpec mask;
  double t;
  FactorizedSpec x_t;
  int max_subband;
};

class Adam {
 public:
  Adam(size_t size, const TrainConfig& cfg)
      : m_(size, 0.0), v_(size, 0.0), cfg_(cfg) {}

  void Step(ParamVector& params, const ParamVector& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.adam_beta1, t_);
    const double c2 = 1.0 - std::pow(cfg_.adam_beta2, t_);
    for (size_t k = 0; k < params.size(); ++k) {
      m_[k] = cfg_.adam_beta1 * m_[k] + (1.0 - cfg_.adam_beta1) * grad[k];
      v_[k] = cfg_.adam_beta2 * v_[k] + (1.0 - cfg_.adam_beta2) * grad[k] * grad[k];
      params[k] -= cfg_.learning_rate * (m_[k] / c1) /
                   (std::sqrt(v_[k] / c2) + cfg_.adam_eps);
    }
  }

 private:
  std::vector<double> m_, v_;
  const TrainConfig& cfg_;
  int t_ = 0;
};

Draw MakeDraw(std::span<const FactorizedSpec> dataset,
              const std::vector<int>& max_subbands, const TrainConfig& cfg,
              const BridgeSchedule& schedule, Rng& rng) {
  const int idx = rng.UniformInt(0, static_cast<int>(dataset.size()) - 1);
  const FactorizedSpec& x0 = dataset[idx];
  MaskSpec mask = SampleMask(rng, x0.num_subbands(), x0.num_frames(),
                             cfg.degradation, cfg.stft, cfg.sample_rate);
  const FactorizedSpec x1 =
      Degrade(x0, mask, cfg.degradation.sigma_fill, rng);
  double t = cfg.fixed_draws ? cfg.fixed_t : 0.0;
  if (!cfg.fixed_draws) {
    const double lo = std::max(cfg.interval.lo, kMinTrainTime);
    // Uniform on (lo, hi]: 1 - U[0, 1) maps onto (0, 1].
    t = lo + (cfg.interval.hi - lo) * (1.0 - rng.Uniform(0.0, 1.0));
  }
  FactorizedSpec x_t = PosteriorSample(schedule, x0, x1, t, rng);
  return {&x0, std::move(mask), t, std::move(x_t),
          cfg.frequency_loss_mask ? max_subbands[idx] : -1};
}

}  // namespace

int HighestActiveSubband(const FactorizedSpec& x0, double rel_floor) {
  const Plane mag = x0.mag().pow(1.0 / x0.rho);
  const double peak = mag.maxCoeff();
  if (!(peak > 0.0)) return 0;
  const Eigen::ArrayXd row_peak = mag.rowwise().maxCoeff();
  for (int i = x0.num_subbands() - 1; i >= 0; --i) {
    if (row_peak[i] >= rel_floor * peak) return i;
  }
  return 0;
}

TrainLog TrainToy(ToyNet& net, std::span<const FactorizedSpec> dataset,
                  const TrainConfig& cfg,
                  const std::function<void(int, double)>& on_step) {
  if (dataset.empty()) throw std::invalid_argument("empty training dataset");
  if (cfg.steps < 0 || cfg.batch_size < 1) {
    throw std::invalid_argument("steps must be >= 0 and batch_size >= 1");
  }
  if (!(cfg.interval.hi > cfg.interval.lo) || cfg.interval.lo < 0.0 ||
      cfg.interval.hi > 1.0) {
    throw std::invalid_argument("training interval must lie in (0, 1]");
  }
  for (const FactorizedSpec& x : dataset) {
    if (x.num_frames() > net.config().window_frames) {
      throw std::invalid_argument("training segment wider than the network "
                                  "window");
    }
  }
  const BridgeSchedule schedule(cfg.beta_max);
  std::vector<int> max_subbands;
  if (cfg.frequency_loss_mask) {
    for (const FactorizedSpec& x : dataset) {
      max_subbands.push_back(HighestActiveSubband(x));
    }
  }

  Rng rng(cfg.seed);
  Adam adam(net.params().size(), cfg);
  TrainLog log;
  log.loss.reserve(cfg.steps);
  std::vector<Draw> fixed;
  if (cfg.fixed_draws) {
    for (int b = 0; b < cfg.batch_size; ++b) {
      fixed.push_back(MakeDraw(dataset, max_subbands, cfg, schedule, rng));
    }
  }

  ParamVector grad(net.params().size());
  ToyNet::Tape tape;
  for (int step = 0; step < cfg.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const Draw draw = cfg.fixed_draws
                            ? fixed[b]
                            : MakeDraw(dataset, max_subbands, cfg, schedule,
                                       rng);
      const FactorizedSpec target =
          TrainingTarget(schedule, draw.x_t, *draw.x0, draw.t);
      const FactorizedSpec pred = net.Forward(draw.x_t, draw.t, &tape);
      const MaskedError err =
          MaskedSquaredError(pred, target, draw.mask, draw.max_subband);
      loss += err.Mean() / cfg.batch_size;
      if (err.elements == 0) continue;

      // d(mean squared error)/d(pred) on the masked elements.
      const double scale = 2.0 / (err.elements * cfg.batch_size);
      FactorizedSpec d_out = pred - target;
      const int rows = draw.max_subband >= 0
                           ? std::min(draw.max_subband + 1, pred.num_subbands())
                           : pred.num_subbands();
      for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < pred.num_frames(); ++j) {
          for (int i = 0; i < pred.num_subbands(); ++i) {
            const bool keep = i < rows && draw.mask(i, j);
            d_out.ch[k](i, j) = keep ? scale * d_out.ch[k](i, j) : 0.0;
          }
        }
      }
      net.Backward(tape, d_out, grad);
    }

    if (cfg.grad_clip > 0.0) {
      double sq = 0.0;
      for (double g : grad) sq += g * g;
      const double norm = std::sqrt(sq);
      if (norm > cfg.grad_clip) {
        const double s = cfg.grad_clip / norm;
        for (double& g : grad) g *= s;
      }
    }
    adam.Step(net.params(), grad);
    log.loss.push_back(loss);
    if (on_step) on_step(step, loss);
  }
  return log;
}

std::vector<PartitionedNet> TrainPartitioned(
    const ToyNetConfig& net_cfg, std::span<const FactorizedSpec> dataset,
    const TrainConfig& cfg, int partitions, int pretrain_steps,
    const std::function<void(int, int, double)>& on_step) {
  const std::vector<TimeInterval> intervals = PartitionIntervals(partitions);
  ToyNet base(net_cfg);
  Rng init(cfg.seed);
  base.InitRandom(init);

  auto progress = [&](int part) {
    return [&on_step, part](int step, double loss) {
      if (on_step) on_step(part, step, loss);
    };
  };

  if (partitions == 1) {
    TrainConfig full = cfg;
    full.steps = cfg.steps + pretrain_steps;
    full.interval = intervals[0];
    full.seed = cfg.seed + 1;
    TrainLog log = TrainToy(base, dataset, full, progress(0));
    std::vector<PartitionedNet> out;
    out.push_back({intervals[0], std::move(base), std::move(log)});
    return out;
  }

  TrainLog pre_log;
  if (pretrain_steps > 0) {
    TrainConfig pre = cfg;
    pre.steps = pretrain_steps;
    pre.interval = {0.0, 1.0};
    pre.seed = cfg.seed + 1;
    pre_log = TrainToy(base, dataset, pre, progress(-1));
  }
  std::vector<PartitionedNet> out;
  for (int p = 0; p < partitions; ++p) {
    ToyNet net = base;
    TrainConfig fine = cfg;
    fine.interval = intervals[p];
    fine.seed = cfg.seed + 2 + p;
    TrainLog log = TrainToy(net, dataset, fine, progress(p));
    log.loss.insert(log.loss.begin(), pre_log.loss.begin(), pre_log.loss.end());
    out.push_back({intervals[p], std::move(net), std::move(log)});
  }
  return out;
}

}  // namespace sbrestore
