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

#ifndef SBRESTORE_STFT_H_
#define SBRESTORE_STFT_H_

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace sbrestore {

// Real N x W matrix; rows are subbands, columns are frames. Column-major, so
// one frame is contiguous in memory.
using Plane = Eigen::ArrayXXd;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 44100;

  int size() const { return static_cast<int>(samples.size()); }
};

// Centered-frame STFT configuration. Defaults are 44.1 kHz music settings.
struct StftParams {
  int fft_size = 2048;
  int win_length = 2048;
  int hop = 512;

  int num_subbands() const { return fft_size / 2 + 1; }

  // Throws std::invalid_argument unless 0 < hop <= win_length <= fft_size
  // and the Hann window has no zero gaps in its squared overlap-add.
  void Validate() const;

  bool operator==(const StftParams&) const = default;
};

struct ComplexSpec {
  Plane re;
  Plane im;

  int num_subbands() const { return static_cast<int>(re.rows()); }
  int num_frames() const { return static_cast<int>(re.cols()); }
  Plane Magnitude() const { return (re.square() + im.square()).sqrt(); }
};

// Periodic Hann window of `win_length` taps, zero-padded (centered) to
// `fft_size`.
std::vector<double> HannWindow(const StftParams& params);

// Number of frames for a signal of `num_samples` samples: frames are centered
// on multiples of the hop, with reflect padding of fft_size / 2 at both ends.
int NumFrames(int num_samples, const StftParams& params);

// Shortest signal length whose STFT has exactly `num_frames` frames.
int MinSamplesForFrames(int num_frames, const StftParams& params);

// Throws std::invalid_argument if the signal is shorter than one window.
ComplexSpec Stft(std::span<const double> samples, const StftParams& params);

// Inverse by weighted overlap-add with the analysis window as synthesis
// window, normalized by the summed squared window.
std::vector<double> Istft(const ComplexSpec& spec, const StftParams& params,
                          int out_len);

// Center frequency of subband `i` in Hz.
double SubbandFrequency(int subband, const StftParams& params,
                        int sample_rate);

// Mean magnitude over all frames of the subbands whose center frequency lies
// in [lo_hz, hi_hz). Throws if a band contains no subband or exceeds Nyquist.
std::vector<double> BandAverageMagnitude(
    const ComplexSpec& spec, const StftParams& params, int sample_rate,
    std::span<const std::pair<double, double>> bands_hz);

}  // namespace sbrestore

#endif  // SBRESTORE_STFT_H_
