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

#ifndef SBRESTORE_MASK_H_
#define SBRESTORE_MASK_H_

#include <cstdint>
#include <string>
#include <vector>

#include "sbrestore/rng.h"
#include "sbrestore/stft.h"

namespace sbrestore {

enum class Task { kNone, kBandwidthExtension, kInpainting };

std::string TaskName(Task task);
// Accepts "none", "bwe" and "inpaint". Throws std::invalid_argument.
Task ParseTask(const std::string& name);

// Inclusive frame range [first, last].
struct FrameGap {
  int first = 0;
  int last = 0;

  int length() const { return last - first + 1; }
  bool operator==(const FrameGap&) const = default;
};

using BoolPlane = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Corruption mask over an N x W x 3 tensor. Both tasks mask whole (subband,
// frame) cells across all three channels, so one N x W plane is stored.
struct MaskSpec {
  BoolPlane cells;
  Task task = Task::kNone;
  // Bandwidth extension: subbands i > cutoff_subband are masked.
  int cutoff_subband = -1;
  // Inpainting: every frame inside one of these ranges is masked.
  std::vector<FrameGap> gaps;

  static MaskSpec None(int num_subbands, int num_frames);
  static MaskSpec BandwidthExtension(int num_subbands, int num_frames,
                                     int cutoff_subband);
  static MaskSpec Inpainting(int num_subbands, int num_frames,
                             std::vector<FrameGap> gaps);

  int num_subbands() const { return static_cast<int>(cells.rows()); }
  int num_frames() const { return static_cast<int>(cells.cols()); }
  bool operator()(int subband, int frame) const {
    return cells(subband, frame);
  }
  // Masked (subband, frame) cells; multiply by 3 for tensor elements.
  int64_t CountCells() const { return cells.count(); }
};

struct DegradationConfig {
  double sigma_fill = 1.0;
  double min_cutoff_hz = 4000.0;
  double max_cutoff_hz = 16000.0;
  double min_gap_s = 0.1;
  double max_gap_s = 1.6;
  // Probability of drawing a bandwidth-extension mask (else inpainting).
  double bwe_probability = 0.5;
};

// Subband index N' for a cutoff frequency, round(f * fft_size / sr) with ties
// rounded up.
int CutoffSubband(double cutoff_hz, const StftParams& params, int sample_rate);

// Number of frames spanned by a gap of `seconds`, rounded half up, >= 1.
int GapFrames(double seconds, const StftParams& params, int sample_rate);

// Draws a bandwidth-extension or inpainting mask for an N x W segment.
// N' is uniform over the subbands whose center frequency lies in
// [min_cutoff_hz, max_cutoff_hz]; gap duration is uniform in
// [min_gap_s, max_gap_s] and its position uniform over placements that fit.
// Throws std::invalid_argument if the segment cannot hold the minimum gap or
// no subband qualifies as a cutoff.
MaskSpec SampleMask(Rng& rng, int num_subbands, int num_frames,
                    const DegradationConfig& cfg, const StftParams& params,
                    int sample_rate);

}  // namespace sbrestore

#endif  // SBRESTORE_MASK_H_
