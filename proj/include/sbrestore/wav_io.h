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

#ifndef SBRESTORE_WAV_IO_H_
#define SBRESTORE_WAV_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbrestore/stft.h"

namespace sbrestore {

// Malformed, unsupported or multichannel input.
class WavError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class WavSampleFormat { kFloat32, kPcm16 };

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  bool is_float = false;
};

// Decodes a mono RIFF/WAVE file: PCM 16/24/32-bit, IEEE float 32/64-bit,
// plain or WAVE_FORMAT_EXTENSIBLE. Samples are scaled to [-1, 1).
Waveform DecodeWav(std::span<const uint8_t> bytes, WavInfo* info = nullptr);
Waveform ReadWav(const std::filesystem::path& path, WavInfo* info = nullptr);

// 16-bit output is scaled by 32768, rounded and clipped to the int16 range.
std::vector<uint8_t> EncodeWav(const Waveform& wave,
                               WavSampleFormat format = WavSampleFormat::kFloat32);
void WriteWav(const std::filesystem::path& path, const Waveform& wave,
              WavSampleFormat format = WavSampleFormat::kFloat32);

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes);

}  // namespace sbrestore

#endif  // SBRESTORE_WAV_IO_H_
