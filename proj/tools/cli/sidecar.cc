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

#include "cli/sidecar.h"

#include <fstream>
#include <string>

#include "cli/errors.h"

namespace sbrestore::cli {

MaskSpec MaskSidecar::ToMask() const {
  switch (task) {
    case Task::kNone:
      return MaskSpec::None(num_subbands, num_frames);
    case Task::kBandwidthExtension:
      return MaskSpec::BandwidthExtension(num_subbands, num_frames,
                                          cutoff_subband);
    case Task::kInpainting:
      return MaskSpec::Inpainting(num_subbands, num_frames, gaps);
  }
  throw std::logic_error("unknown task");
}

nlohmann::ordered_json ToJson(const MaskSidecar& s) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSidecarSchema;
  j["task"] = TaskName(s.task);
  j["sample_rate"] = s.sample_rate;
  j["num_samples"] = s.num_samples;
  j["stft"] = {{"fft_size", s.stft.fft_size},
               {"win_length", s.stft.win_length},
               {"hop", s.stft.hop}};
  j["num_subbands"] = s.num_subbands;
  j["num_frames"] = s.num_frames;
  if (s.task == Task::kBandwidthExtension) {
    j["cutoff_hz"] = s.cutoff_hz;
    j["cutoff_subband"] = s.cutoff_subband;
  } else if (s.task == Task::kInpainting) {
    j["gap_ms"] = s.gap_ms;
    j["period_s"] = s.period_s;
    nlohmann::ordered_json gaps = nlohmann::ordered_json::array();
    for (const FrameGap& g : s.gaps) gaps.push_back({g.first, g.last});
    j["gap_frames"] = gaps;
  }
  return j;
}

MaskSidecar SidecarFromJson(const nlohmann::json& j) {
  MaskSidecar s;
  try {
    if (j.at("schema_version").get<int>() != kSidecarSchema) {
      throw DataError("unsupported mask sidecar schema");
    }
    s.task = ParseTask(j.at("task").get<std::string>());
    s.sample_rate = j.at("sample_rate").get<int>();
    s.num_samples = j.at("num_samples").get<int>();
    s.stft.fft_size = j.at("stft").at("fft_size").get<int>();
    s.stft.win_length = j.at("stft").at("win_length").get<int>();
    s.stft.hop = j.at("stft").at("hop").get<int>();
    s.num_subbands = j.at("num_subbands").get<int>();
    s.num_frames = j.at("num_frames").get<int>();
    if (s.task == Task::kBandwidthExtension) {
      s.cutoff_hz = j.at("cutoff_hz").get<double>();
      s.cutoff_subband = j.at("cutoff_subband").get<int>();
    } else if (s.task == Task::kInpainting) {
      s.gap_ms = j.at("gap_ms").get<double>();
      s.period_s = j.at("period_s").get<double>();
      for (const auto& g : j.at("gap_frames")) {
        s.gaps.push_back({g.at(0).get<int>(), g.at(1).get<int>()});
      }
    }
    s.stft.Validate();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed mask sidecar: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid mask sidecar: ") + e.what());
  }
  if (s.num_subbands != s.stft.num_subbands() ||
      s.num_frames != NumFrames(s.num_samples, s.stft)) {
    throw DataError("mask sidecar shape disagrees with its STFT parameters");
  }
  try {
    s.ToMask();
  } catch (const std::exception& e) {
    throw DataError(std::string("invalid mask in sidecar: ") + e.what());
  }
  return s;
}

void WriteSidecar(const std::filesystem::path& path, const MaskSidecar& s) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot write " + path.string());
  os << ToJson(s).dump(2) << "\n";
}

MaskSidecar ReadSidecar(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open mask sidecar " + path.string());
  try {
    return SidecarFromJson(nlohmann::json::parse(is));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::filesystem::path SidecarPathFor(const std::filesystem::path& wav) {
  return std::filesystem::path(wav.string() + ".mask.json");
}

}  // namespace sbrestore::cli
