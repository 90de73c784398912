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

#include "sbrestore/mask.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace sbrestore {
namespace {

int RoundHalfUp(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace

std::string TaskName(Task task) {
  switch (task) {
    case Task::kNone:
      return "none";
    case Task::kBandwidthExtension:
      return "bwe";
    case Task::kInpainting:
      return "inpaint";
  }
  return "unknown";
}

Task ParseTask(const std::string& name) {
  if (name == "none") return Task::kNone;
  if (name == "bwe") return Task::kBandwidthExtension;
  if (name == "inpaint") return Task::kInpainting;
  throw std::invalid_argument("unknown task '" + name +
                              "' (expected none, bwe or inpaint)");
}

MaskSpec MaskSpec::None(int num_subbands, int num_frames) {
  MaskSpec m;
  m.cells = BoolPlane::Constant(num_subbands, num_frames, false);
  return m;
}

MaskSpec MaskSpec::BandwidthExtension(int num_subbands, int num_frames,
                                      int cutoff_subband) {
  if (cutoff_subband < 0 || cutoff_subband >= num_subbands) {
    throw std::invalid_argument("cutoff subband outside spectrogram");
  }
  MaskSpec m = None(num_subbands, num_frames);
  m.task = Task::kBandwidthExtension;
  m.cutoff_subband = cutoff_subband;
  m.cells.bottomRows(num_subbands - cutoff_subband - 1).setConstant(true);
  return m;
}

MaskSpec MaskSpec::Inpainting(int num_subbands, int num_frames,
                              std::vector<FrameGap> gaps) {
  MaskSpec m = None(num_subbands, num_frames);
  m.task = Task::kInpainting;
  for (const FrameGap& g : gaps) {
    if (g.first < 0 || g.last < g.first || g.last >= num_frames) {
      throw std::invalid_argument("inpainting gap outside spectrogram");
    }
    m.cells.middleCols(g.first, g.length()).setConstant(true);
  }
  m.gaps = std::move(gaps);
  return m;
}

int CutoffSubband(double cutoff_hz, const StftParams& params,
                  int sample_rate) {
  return RoundHalfUp(cutoff_hz * params.fft_size / sample_rate);
}

int GapFrames(double seconds, const StftParams& params, int sample_rate) {
  return std::max(1, RoundHalfUp(seconds * sample_rate / params.hop));
}

MaskSpec SampleMask(Rng& rng, int num_subbands, int num_frames,
                    const DegradationConfig& cfg, const StftParams& params,
                    int sample_rate) {
  if (num_subbands < 2 || num_frames < 1) {
    throw std::invalid_argument("mask shape too small");
  }
  if (rng.Bernoulli(cfg.bwe_probability)) {
    const int lo = static_cast<int>(
        std::ceil(cfg.min_cutoff_hz * params.fft_size / sample_rate - 1e-9));
    const int hi = std::min(
        static_cast<int>(
            std::floor(cfg.max_cutoff_hz * params.fft_size / sample_rate +
                       1e-9)),
        num_subbands - 2);
    if (lo > hi) {
      throw std::invalid_argument("no subband lies in the cutoff range");
    }
    return MaskSpec::BandwidthExtension(num_subbands, num_frames,
                                        rng.UniformInt(lo, hi));
  }
  const int min_frames = GapFrames(cfg.min_gap_s, params, sample_rate);
  if (min_frames > num_frames) {
    throw std::invalid_argument("segment of " + std::to_string(num_frames) +
                                " frames cannot hold the minimum gap of " +
                                std::to_string(min_frames) + " frames");
  }
  const double seconds = cfg.max_gap_s > cfg.min_gap_s
                             ? rng.Uniform(cfg.min_gap_s, cfg.max_gap_s)
                             : cfg.min_gap_s;
  const int frames =
      std::min(GapFrames(seconds, params, sample_rate), num_frames);
  const int first = rng.UniformInt(0, num_frames - frames);
  return MaskSpec::Inpainting(num_subbands, num_frames,
                              {FrameGap{first, first + frames - 1}});
}

}  // namespace sbrestore
