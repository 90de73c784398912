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

#include "sbrestore/sampler.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>

namespace sbrestore {
namespace {

using EvalFn = std::function<FactorizedSpec(const FactorizedSpec&, double)>;

void ClampKnown(const MaskSpec& mask, const FactorizedSpec& x1,
                FactorizedSpec& x) {
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < x.num_frames(); ++j) {
      for (int i = 0; i < x.num_subbands(); ++i) {
        if (!mask(i, j)) x.ch[k](i, j) = x1.ch[k](i, j);
      }
    }
  }
}

FactorizedSpec RunSampler(const BridgeSchedule& schedule,
                          const FactorizedSpec& x1, const MaskSpec& mask,
                          const EvalFn& eval, const SamplerConfig& cfg,
                          Rng& rng) {
  if (cfg.num_steps < 1) throw std::invalid_argument("num_steps must be >= 1");
  if (mask.num_subbands() != x1.num_subbands() ||
      mask.num_frames() != x1.num_frames()) {
    throw std::invalid_argument("mask shape does not match input");
  }
  FactorizedSpec x = x1;
  const int n = cfg.num_steps;
  for (int k = n; k >= 1; --k) {
    const double t = static_cast<double>(k) / n;
    const double t_prev = static_cast<double>(k - 1) / n;
    const FactorizedSpec eps = eval(x, t);
    const FactorizedSpec x0_hat = PredictX0(schedule, x, eps, t);
    x = ReverseStep(schedule, x, x0_hat, t, t - t_prev, rng,
                    cfg.deterministic);
    if (cfg.clamp_known_region) ClampKnown(mask, x1, x);
  }
  return x;
}

FactorizedSpec CyclicPad(const FactorizedSpec& x, int padding) {
  if (padding == 0) return x;
  const int w = x.num_frames();
  FactorizedSpec out = FactorizedSpec::Zero(x.num_subbands(), w + padding,
                                            x.rho);
  for (int k = 0; k < 3; ++k) {
    out.ch[k].leftCols(w) = x.ch[k];
    for (int j = 0; j < padding; ++j) out.ch[k].col(w + j) = x.ch[k].col(j % w);
  }
  return out;
}

}  // namespace

FactorizedSpec PredictX0(const BridgeSchedule& schedule,
                         const FactorizedSpec& x_t,
                         const FactorizedSpec& eps_hat, double t) {
  return x_t - eps_hat * schedule.Sigma(t);
}

ReverseStepCoefficients ReverseCoefficients(const BridgeSchedule& schedule,
                                            double t, double dt) {
  if (!(t > 0.0 && t <= 1.0) || !(dt >= 0.0) || t - dt < -1e-12) {
    throw std::invalid_argument("reverse step needs 0 <= t - dt <= t <= 1, "
                                "t > 0");
  }
  const double t_prev = std::max(0.0, t - dt);
  const double s2 = schedule.Sigma2(t);
  const double s2_prev = schedule.Sigma2(t_prev);
  const double delta = s2 - s2_prev;
  return {delta / s2, s2_prev / s2, delta * s2_prev / s2};
}

FactorizedSpec ReverseStep(const BridgeSchedule& schedule,
                           const FactorizedSpec& x_t,
                           const FactorizedSpec& x0_hat, double t, double dt,
                           Rng& rng, bool deterministic) {
  if (!x_t.SameShape(x0_hat)) throw std::invalid_argument("shape mismatch");
  const ReverseStepCoefficients c = ReverseCoefficients(schedule, t, dt);
  // Terminal step: sigma^2(0) = 0 collapses the posterior onto X0_hat.
  if (t - dt <= 0.0) return x0_hat;
  FactorizedSpec out = x_t;
  const double stddev = std::sqrt(c.variance);
  for (int k = 0; k < 3; ++k) {
    // x_t + w0 (x0_hat - x_t) equals w0 x0_hat + wt x_t since w0 + wt = 1,
    // and is exact at both limits.
    out.ch[k] = x_t.ch[k] + c.weight_x0 * (x0_hat.ch[k] - x_t.ch[k]);
    if (!deterministic) {
      out.ch[k] +=
          rng.NormalPlane(x_t.num_subbands(), x_t.num_frames(), stddev);
    }
  }
  return out;
}

FactorizedSpec Restore(const BridgeSchedule& schedule,
                       const FactorizedSpec& x1, const MaskSpec& mask,
                       const Denoiser& denoiser, const SamplerConfig& cfg,
                       Rng& rng) {
  const int window = denoiser.window_frames();
  if (window > 0 && x1.num_frames() > window) {
    throw std::invalid_argument(
        "input of " + std::to_string(x1.num_frames()) +
        " frames is wider than the denoiser window (" +
        std::to_string(window) + "); use RestoreLong");
  }
  return RunSampler(
      schedule, x1, mask,
      [&](const FactorizedSpec& x, double t) {
        return denoiser.Evaluate(x, t);
      },
      cfg, rng);
}

WindowPlan PlanWindows(int full_width, int window, int hop) {
  if (hop <= 0) throw std::invalid_argument("window hop must be positive");
  if (window <= 0 || full_width <= 0) {
    throw std::invalid_argument("window and input widths must be positive");
  }
  if (hop > window) {
    throw std::invalid_argument("window hop larger than the window leaves "
                                "gaps");
  }
  WindowPlan plan;
  plan.full_width = full_width;
  plan.window = window;
  plan.hop = hop;
  plan.offsets.push_back(0);
  if (full_width > window) {
    int offset = 0;
    while (offset + window < full_width) {
      offset += hop;
      plan.offsets.push_back(offset);
    }
    plan.padding = offset + window - full_width;
  }
  plan.coverage.assign(full_width, 0);
  const int w = plan.effective_window();
  for (int offset : plan.offsets) {
    for (int f = offset; f < std::min(offset + w, full_width); ++f) {
      ++plan.coverage[f];
    }
  }
  return plan;
}

FactorizedSpec MultiDiffusionEval(const FactorizedSpec& x_t_full, double t,
                                  const Denoiser& denoiser,
                                  const WindowPlan& plan, int num_threads) {
  const int full = x_t_full.num_frames();
  if (plan.full_width != full ||
      static_cast<int>(plan.coverage.size()) != full) {
    throw std::invalid_argument("window plan does not match input width");
  }
  for (int c : plan.coverage) {
    if (c <= 0) throw std::logic_error("window plan leaves a frame uncovered");
  }
  const int w = plan.effective_window();
  if (plan.window_count() == 1 && w == full) {
    return denoiser.Evaluate(x_t_full, t);
  }

  const FactorizedSpec padded = CyclicPad(x_t_full, plan.padding);
  const int count = plan.window_count();
  std::vector<FactorizedSpec> outputs(count);
  auto eval_window = [&](int k) {
    const int offset = plan.offsets[k];
    outputs[k] = denoiser.Evaluate(padded.Frames(offset, w), t,
                                   PatchLocation{offset, full});
  };
  const int threads = std::clamp(num_threads, 1, count);
  if (threads == 1) {
    for (int k = 0; k < count; ++k) eval_window(k);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (int th = 0; th < threads; ++th) {
        pool.emplace_back([&, th] {
          try {
            for (int k = next++; k < count; k = next++) eval_window(k);
          } catch (...) {
            errors[th] = std::current_exception();
          }
        });
      }
    }
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  FactorizedSpec acc = FactorizedSpec::Zero(x_t_full.num_subbands(), full,
                                            x_t_full.rho);
  for (int k = 0; k < count; ++k) {
    const int offset = plan.offsets[k];
    const int keep = std::min(w, full - offset);
    for (int c = 0; c < 3; ++c) {
      acc.ch[c].middleCols(offset, keep) += outputs[k].ch[c].leftCols(keep);
    }
  }
  for (int j = 0; j < full; ++j) {
    const double inv = 1.0 / plan.coverage[j];
    for (int c = 0; c < 3; ++c) acc.ch[c].col(j) *= inv;
  }
  return acc;
}

FactorizedSpec RestoreLong(const BridgeSchedule& schedule,
                           const FactorizedSpec& x1_full, const MaskSpec& mask,
                           const Denoiser& denoiser, const SamplerConfig& cfg,
                           const WindowPlan& plan, Rng& rng) {
  const int window = denoiser.window_frames();
  if (window > 0 && plan.effective_window() > window) {
    throw std::invalid_argument("plan window exceeds the denoiser window");
  }
  return RunSampler(
      schedule, x1_full, mask,
      [&](const FactorizedSpec& x, double t) {
        return MultiDiffusionEval(x, t, denoiser, plan, cfg.num_threads);
      },
      cfg, rng);
}

}  // namespace sbrestore
