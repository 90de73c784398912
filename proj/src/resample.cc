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
#include <numeric>
#include <stdexcept>

namespace sbrestore {
namespace {

// Phase tables are precomputed only for modest numbers of phases.
constexpr int64_t kMaxTablePhases = 4096;

struct Kernel {
  double fc;       // cutoff, cycles per input sample times two
  double half;     // support half-width in input samples
  double beta;
  double i0_beta;

  double operator()(double tau) const {
    if (std::abs(tau) >= half) return 0.0;
    const double x = fc * tau;
    const double sinc =
        x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = tau / half;
    const double win = std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / i0_beta;
    return fc * sinc * win;
  }
};

}  // namespace

std::vector<double> Resample(std::span<const double> x, int from_rate,
                             int to_rate, const ResampleQuality& q) {
  if (from_rate <= 0 || to_rate <= 0) {
    throw std::invalid_argument("sample rates must be positive");
  }
  if (q.zero_crossings < 1 || !(q.rolloff > 0.0 && q.rolloff <= 1.0)) {
    throw std::invalid_argument("invalid resampler quality settings");
  }
  if (from_rate == to_rate) return {x.begin(), x.end()};
  const int64_t g = std::gcd(from_rate, to_rate);
  const int64_t up = to_rate / g;
  const int64_t down = from_rate / g;
  Kernel kernel;
  kernel.fc = q.rolloff * std::min(1.0, static_cast<double>(up) / down);
  kernel.half = q.zero_crossings / kernel.fc;
  kernel.beta = q.kaiser_beta;
  kernel.i0_beta = std::cyl_bessel_i(0.0, q.kaiser_beta);

  const int64_t n_in = static_cast<int64_t>(x.size());
  const int64_t n_out = (n_in * up + down - 1) / down;
  const int taps = static_cast<int>(std::ceil(kernel.half));

  // Output m sits at input position (m * down) / up = base + phase / up.
  std::vector<std::vector<double>> table;
  if (up <= kMaxTablePhases) {
    table.resize(up);
    for (int64_t p = 0; p < up; ++p) {
      const double frac = static_cast<double>(p) / up;
      table[p].resize(2 * taps + 1);
      for (int k = -taps; k <= taps; ++k) table[p][k + taps] = kernel(frac - k);
    }
  }
  std::vector<double> y(n_out);
  for (int64_t m = 0; m < n_out; ++m) {
    const int64_t base = (m * down) / up;
    const int64_t phase = (m * down) % up;
    const double frac = static_cast<double>(phase) / up;
    double acc = 0.0;
    for (int k = -taps; k <= taps; ++k) {
      const int64_t idx = base + k;
      if (idx < 0 || idx >= n_in) continue;
      const double h = table.empty() ? kernel(frac - k) : table[phase][k + taps];
      acc += x[idx] * h;
    }
    y[m] = acc;
  }
  return y;
}

Waveform Resample(const Waveform& w, int to_rate, const ResampleQuality& q) {
  Waveform out;
  out.sample_rate = to_rate;
  out.samples = Resample(w.samples, w.sample_rate, to_rate, q);
  return out;
}

}  // namespace sbrestore
