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

#ifndef SBRESTORE_CLI_SIDECAR_H_
#define SBRESTORE_CLI_SIDECAR_H_

#include <filesystem>
#include <vector>

#include "json.hpp"
#include "sbrestore/mask.h"
#include "sbrestore/stft.h"

namespace sbrestore::cli {

inline constexpr int kSidecarSchema = 1;

// Exact description of the mask applied by `degrade`, enough to rebuild the
// MaskSpec without the original file.
struct MaskSidecar {
  Task task = Task::kNone;
  int sample_rate = 0;
  int num_samples = 0;
  StftParams stft;
  int num_subbands = 0;
  int num_frames = 0;
  double cutoff_hz = 0.0;
  int cutoff_subband = -1;
  double gap_ms = 0.0;
  double period_s = 0.0;
  std::vector<FrameGap> gaps;

  MaskSpec ToMask() const;
};

nlohmann::ordered_json ToJson(const MaskSidecar& s);
MaskSidecar SidecarFromJson(const nlohmann::json& j);

void WriteSidecar(const std::filesystem::path& path, const MaskSidecar& s);
// Throws DataError on unreadable or inconsistent files.
MaskSidecar ReadSidecar(const std::filesystem::path& path);

// `<wav path>.mask.json`.
std::filesystem::path SidecarPathFor(const std::filesystem::path& wav);

}  // namespace sbrestore::cli

#endif  // SBRESTORE_CLI_SIDECAR_H_
