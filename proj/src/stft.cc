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

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sbrestore {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per size under a lock and never destroyed.
struct FftPlans {
  fftw_plan forward;
  fftw_plan inverse;
};

const FftPlans& PlansFor(int fft_size) {
  static std::mutex mu;
  static std::map<int, FftPlans> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(fft_size);
  if (it != cache.end()) return it->second;
  double* in = fftw_alloc_real(fft_size);
  fftw_complex* out = fftw_alloc_complex(fft_size / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  FftPlans plans{fftw_plan_dft_r2c_1d(fft_size, in, out, flags),
                 fftw_plan_dft_c2r_1d(fft_size, out, in, flags)};
  fftw_free(in);
  fftw_free(out);
  return cache.emplace(fft_size, plans).first->second;
}

}  // namespace

void StftParams::Validate() const {
  if (fft_size < 2 || fft_size % 2 != 0) {
    throw std::invalid_argument("fft_size must be even and >= 2");
  }
  if (hop <= 0 || hop > win_length || win_length > fft_size) {
    throw std::invalid_argument(
        "STFT params need 0 < hop <= win_length <= fft_size (got hop=" +
        std::to_string(hop) + ", win=" + std::to_string(win_length) +
        ", fft=" + std::to_string(fft_size) + ")");
  }
  // Overlap-add of the squared window must be bounded away from zero.
  const std::vector<double> window = HannWindow(*this);
  double lo = INFINITY, hi = 0.0;
  for (int n = 0; n < hop; ++n) {
    double acc = 0.0;
    for (int k = n; k < fft_size; k += hop) acc += window[k] * window[k];
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
  }
  if (!(lo > 1e-3 * hi)) {
    throw std::invalid_argument("Hann window does not overlap-add for hop " +
                                std::to_string(hop));
  }
}

std::vector<double> HannWindow(const StftParams& params) {
  std::vector<double> window(params.fft_size, 0.0);
  const int offset = (params.fft_size - params.win_length) / 2;
  for (int n = 0; n < params.win_length; ++n) {
    window[offset + n] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / params.win_length);
  }
  return window;
}

int NumFrames(int num_samples, const StftParams& params) {
  return 1 + num_samples / params.hop;
}

int MinSamplesForFrames(int num_frames, const StftParams& params) {
  return (num_frames - 1) * params.hop;
}

ComplexSpec Stft(std::span<const double> samples, const StftParams& params) {
  params.Validate();
  const int len = static_cast<int>(samples.size());
  const int pad = params.fft_size / 2;
  if (len < params.win_length || len <= pad) {
    throw std::invalid_argument("signal of " + std::to_string(len) +
                                " samples is shorter than one window (" +
                                std::to_string(params.win_length) + ")");
  }
  std::vector<double> padded(len + 2 * pad);
  for (int k = 0; k < static_cast<int>(padded.size()); ++k) {
    int src = k - pad;
    if (src < 0) src = -src;
    if (src >= len) src = 2 * (len - 1) - src;
    padded[k] = samples[src];
  }

  const int num_frames = NumFrames(len, params);
  const int n_sub = params.num_subbands();
  const std::vector<double> window = HannWindow(params);
  const FftPlans& plans = PlansFor(params.fft_size);

  ComplexSpec spec{Plane(n_sub, num_frames), Plane(n_sub, num_frames)};
  std::vector<double> frame(params.fft_size);
  std::vector<std::complex<double>> bins(n_sub);
  for (int j = 0; j < num_frames; ++j) {
    const double* src = padded.data() + static_cast<size_t>(j) * params.hop;
    for (int n = 0; n < params.fft_size; ++n) frame[n] = src[n] * window[n];
    fftw_execute_dft_r2c(plans.forward, frame.data(),
                         reinterpret_cast<fftw_complex*>(bins.data()));
    for (int i = 0; i < n_sub; ++i) {
      spec.re(i, j) = bins[i].real();
      spec.im(i, j) = bins[i].imag();
    }
  }
  return spec;
}

std::vector<double> Istft(const ComplexSpec& spec, const StftParams& params,
                          int out_len) {
  params.Validate();
  const int n_sub = params.num_subbands();
  if (spec.re.rows() != n_sub || spec.im.rows() != n_sub ||
      spec.re.cols() != spec.im.cols() || spec.re.cols() < 1) {
    throw std::invalid_argument("spectrogram shape does not match STFT params");
  }
  if (out_len < 0) throw std::invalid_argument("negative output length");
  const int num_frames = spec.num_frames();
  const int pad = params.fft_size / 2;
  const int padded_len = (num_frames - 1) * params.hop + params.fft_size;
  if (out_len > padded_len - pad) {
    throw std::invalid_argument(std::to_string(num_frames) +
                                " frames cannot cover " +
                                std::to_string(out_len) + " samples");
  }
  const std::vector<double> window = HannWindow(params);
  const FftPlans& plans = PlansFor(params.fft_size);

  std::vector<double> acc(padded_len, 0.0), norm(padded_len, 0.0);
  std::vector<std::complex<double>> bins(n_sub);
  std::vector<double> frame(params.fft_size);
  const double scale = 1.0 / params.fft_size;
  for (int j = 0; j < num_frames; ++j) {
    for (int i = 0; i < n_sub; ++i) bins[i] = {spec.re(i, j), spec.im(i, j)};
    // c2r ignores the imaginary parts of DC and Nyquist, as irfft does.
    fftw_execute_dft_c2r(plans.inverse,
                         reinterpret_cast<fftw_complex*>(bins.data()),
                         frame.data());
    const size_t start = static_cast<size_t>(j) * params.hop;
    for (int n = 0; n < params.fft_size; ++n) {
      acc[start + n] += frame[n] * scale * window[n];
      norm[start + n] += window[n] * window[n];
    }
  }

  std::vector<double> out(out_len, 0.0);
  for (int k = 0; k < out_len; ++k) {
    const int p = k + pad;
    if (p >= padded_len) break;
    if (norm[p] > 1e-11) out[k] = acc[p] / norm[p];
  }
  return out;
}

double SubbandFrequency(int subband, const StftParams& params,
                        int sample_rate) {
  return static_cast<double>(subband) * sample_rate / params.fft_size;
}

std::vector<double> BandAverageMagnitude(
    const ComplexSpec& spec, const StftParams& params, int sample_rate,
    std::span<const std::pair<double, double>> bands_hz) {
  const double nyquist = 0.5 * sample_rate;
  const Plane mag = spec.Magnitude();
  std::vector<double> out;
  out.reserve(bands_hz.size());
  for (const auto& [lo, hi] : bands_hz) {
    if (lo < 0.0 || hi > nyquist + 1e-9 || !(hi > lo)) {
      throw std::invalid_argument("band edges must satisfy 0 <= lo < hi <= "
                                  "Nyquist");
    }
    double sum = 0.0;
    int cells = 0;
    for (int i = 0; i < spec.num_subbands(); ++i) {
      const double f = SubbandFrequency(i, params, sample_rate);
      // The top band is closed so the Nyquist bin is included.
      const bool in_band = f >= lo && (f < hi || (hi >= nyquist && f <= hi));
      if (!in_band) continue;
      sum += mag.row(i).sum();
      cells += spec.num_frames();
    }
    if (cells == 0) {
      throw std::invalid_argument("band [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + ") Hz has no subbands");
    }
    out.push_back(sum / cells);
  }
  return out;
}

}  // namespace sbrestore
