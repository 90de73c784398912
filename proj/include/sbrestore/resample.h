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

#ifndef SBRESTORE_RESAMPLE_H_
#define SBRESTORE_RESAMPLE_H_

#include <span>
#include <vector>

#include "sbrestore/stft.h"

namespace sbrestore {

struct ResampleQuality {
  // Filter half-length in zero crossings of the lowpass sinc.
  int zero_crossings = 32;
  double kaiser_beta = 8.6;
  // Passband edge as a fraction of the lower Nyquist rate.
  double rolloff = 0.945;
};

// Rational-ratio Kaiser-windowed sinc resampler. Output length is
// ceil(n * to / from); identical rates return the input unchanged.
std::vector<double> Resample(std::span<const double> x, int from_rate,
                             int to_rate, const ResampleQuality& q = {});
Waveform Resample(const Waveform& w, int to_rate, const ResampleQuality& q = {});

}  // namespace sbrestore

#endif  // SBRESTORE_RESAMPLE_H_
