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

#include "sbrestore/corpus.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbrestore {

Waveform SynthesizeSegment(const SynthConfig& cfg, Rng& rng) {
  if (cfg.num_samples < 1 || cfg.sample_rate < 1 || cfg.max_notes < 1 ||
      cfg.min_harmonics < 1 || cfg.max_harmonics < cfg.min_harmonics ||
      !(cfg.min_f0_hz > 0.0) || cfg.max_f0_hz < cfg.min_f0_hz) {
    throw std::invalid_argument("invalid synthesis configuration");
  }
  const double sr = cfg.sample_rate;
  const double nyquist = 0.5 * sr;
  const int len = cfg.num_samples;
  Waveform wave;
  wave.sample_rate = cfg.sample_rate;
  wave.samples.assign(len, 0.0);

  const int notes = rng.UniformInt(1, cfg.max_notes);
  for (int note = 0; note < notes; ++note) {
    // Log-uniform fundamental.
    const double f0 = std::exp(
        rng.Uniform(std::log(cfg.min_f0_hz), std::log(cfg.max_f0_hz) + 1e-12));
    const int harmonics = rng.UniformInt(cfg.min_harmonics, cfg.max_harmonics);
    const double amplitude = rng.Uniform(0.05, 0.3);
    const double tilt = rng.Uniform(0.5, 2.0);
    const double onset = rng.Uniform(-0.5, 0.8) * len;
    const double decay_s = rng.Uniform(0.1, 1.0);
    const double attack_s = 0.005;
    for (int h = 1; h <= harmonics; ++h) {
      const double f = f0 * h;
      if (f >= 0.95 * nyquist) break;
      const double a = amplitude * std::pow(h, -tilt);
      const double phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
      const double w = 2.0 * std::numbers::pi * f / sr;
      for (int n = std::max(0, static_cast<int>(std::ceil(onset))); n < len;
           ++n) {
        const double age = (n - onset) / sr;
        const double env =
            std::min(1.0, age / attack_s) * std::exp(-age / decay_s);
        wave.samples[n] += a * env * std::sin(w * n + phase);
      }
    }
  }

  if (rng.Bernoulli(cfg.filtered_noise_probability)) {
    const double level = rng.Uniform(0.005, 0.05);
    const double pole = rng.Uniform(0.5, 0.98);
    const int start = rng.UniformInt(0, len - 1);
    const int stop = std::min(len, start + rng.UniformInt(1, len));
    double state = 0.0;
    for (int n = start; n < stop; ++n) {
      state = pole * state + (1.0 - pole) * rng.Normal();
      wave.samples[n] += level * state / std::sqrt((1.0 - pole) / (1.0 + pole));
    }
  }
  for (double& s : wave.samples) s += cfg.noise_floor * rng.Normal();

  double peak = 0.0;
  for (double s : wave.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.9) {
    for (double& s : wave.samples) s *= 0.9 / peak;
  }
  return wave;
}

std::vector<Waveform> SynthesizeCorpus(const SynthConfig& cfg, int count,
                                       uint64_t seed) {
  Rng root(seed);
  std::vector<Waveform> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Rng item = root.Fork();
    out.push_back(SynthesizeSegment(cfg, item));
  }
  return out;
}

std::vector<FactorizedSpec> FactorizeCorpus(const std::vector<Waveform>& waves,
                                            const StftParams& params,
                                            double rho) {
  std::vector<FactorizedSpec> out;
  out.reserve(waves.size());
  for (const Waveform& w : waves) {
    out.push_back(Factorize(Stft(w.samples, params), rho));
  }
  return out;
}

}  // namespace sbrestore
