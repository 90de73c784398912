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

#ifndef SBRESTORE_METRICS_H_
#define SBRESTORE_METRICS_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sbrestore/mask.h"
#include "sbrestore/stft.h"

namespace sbrestore {

inline constexpr double kLsdMagnitudeFloor = 1e-8;
inline constexpr double kSiSpecCapDb = 100.0;

using PlaneRef = Eigen::Ref<const Plane>;

// Log-spectral distance between magnitude spectrograms: per frame, the RMS
// over subbands of log10(ref^2 / est^2), averaged over frames. Magnitudes
// are floored at `floor`. Throws on shape mismatch.
double Lsd(const PlaneRef& mag_ref, const PlaneRef& mag_est,
           double floor = kLsdMagnitudeFloor);

enum class SiSpecForm {
  // Target alpha * ref with alpha = <est, ref> / |ref|^2.
  kConventional,
  // Target alpha * ref with alpha = <est, ref> / |est|^2. Not scale
  // invariant; kept for comparison.
  kPrinted,
};

// Scale-invariant spectrogram-to-noise ratio in dB over the flattened
// magnitudes, clamped to +-kSiSpecCapDb. Throws for an all-zero reference.
double SiSpec(const PlaneRef& mag_ref, const PlaneRef& mag_est,
              SiSpecForm form = SiSpecForm::kConventional);

struct EvalEntry {
  std::string file;
  double lsd = 0.0;
  double sispec = 0.0;
  // Metrics restricted to the degraded region (high band or gap frames).
  double region_lsd = 0.0;
  double region_sispec = 0.0;
};

struct EvalSection {
  std::string label;
  Task task = Task::kNone;
  double cutoff_hz = 0.0;
  double gap_ms = 0.0;
  double period_s = 0.0;
  std::vector<EvalEntry> entries;
  // Files present on only one side, left out of the means.
  std::vector<std::string> skipped;

  // Means over entries.
  EvalEntry Mean() const;
};

inline constexpr int kEvalReportSchema = 1;

struct EvalReport {
  int schema_version = kEvalReportSchema;
  double magnitude_floor = kLsdMagnitudeFloor;
  std::vector<EvalSection> sections;
};

// Gaps of `gap_ms` centered at (k + 1/2) * period_s for every k whose gap
// ends inside the signal, as inclusive frame ranges.
std::vector<FrameGap> InpaintGapGrid(int num_samples, int sample_rate,
                                     double gap_ms, double period_s,
                                     const StftParams& params);

// Full-band metrics of aligned waveforms plus region metrics above the
// cutoff subband. Lengths may differ by at most one hop (the longer one is
// truncated); otherwise throws std::invalid_argument.
EvalEntry EvalProtocolBwe(const Waveform& ref, const Waveform& restored,
                          double cutoff_hz, const StftParams& params);

// Global metrics plus region metrics over the frames of the gap grid.
EvalEntry EvalProtocolInpaint(const Waveform& ref, const Waveform& restored,
                              double gap_ms, double period_s,
                              const StftParams& params);

std::string FormatReportText(const EvalReport& report);
std::string FormatReportJson(const EvalReport& report);

}  // namespace sbrestore

#endif  // SBRESTORE_METRICS_H_
