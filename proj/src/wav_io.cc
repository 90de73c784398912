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

#include "sbrestore/wav_io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace sbrestore {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t U32(const uint8_t* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t U16(const uint8_t* p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }

void Put32(std::vector<uint8_t>& out, uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<uint8_t>(v >> (8 * k)));
}
void Put16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}
void PutTag(std::vector<uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

Waveform DecodeWav(std::span<const uint8_t> bytes, WavInfo* info) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw WavError("not a RIFF/WAVE file");
  }
  WavInfo fmt;
  uint16_t tag = 0;
  bool have_fmt = false;
  const uint8_t* data = nullptr;
  size_t data_len = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    const uint32_t len = U32(chunk + 4);
    const size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16 || body + len > bytes.size()) {
        throw WavError("truncated fmt chunk");
      }
      const uint8_t* f = bytes.data() + body;
      tag = U16(f);
      fmt.channels = U16(f + 2);
      fmt.sample_rate = static_cast<int>(U32(f + 4));
      fmt.bits_per_sample = U16(f + 14);
      if (tag == kFormatExtensible) {
        if (len < 40) throw WavError("truncated extensible fmt chunk");
        tag = U16(f + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      // Tolerate writers that leave the data length unset or too large.
      data_len = std::min<size_t>(len, bytes.size() - body);
    }
    pos = body + len + (len & 1);
  }
  if (!have_fmt) throw WavError("missing fmt chunk");
  if (data == nullptr) throw WavError("missing data chunk");
  if (fmt.channels != 1) {
    throw WavError("only mono input is supported (file has " +
                   std::to_string(fmt.channels) + " channels)");
  }
  if (fmt.sample_rate <= 0) throw WavError("invalid sample rate");
  fmt.is_float = tag == kFormatFloat;
  if (tag != kFormatPcm && tag != kFormatFloat) {
    throw WavError("unsupported WAV encoding " + std::to_string(tag));
  }
  const int bytes_per = fmt.bits_per_sample / 8;
  const bool ok = fmt.is_float
                      ? (fmt.bits_per_sample == 32 || fmt.bits_per_sample == 64)
                      : (fmt.bits_per_sample == 16 || fmt.bits_per_sample == 24 ||
                         fmt.bits_per_sample == 32);
  if (!ok) {
    throw WavError("unsupported sample width " +
                   std::to_string(fmt.bits_per_sample));
  }
  const size_t n = data_len / bytes_per;
  Waveform wave;
  wave.sample_rate = fmt.sample_rate;
  wave.samples.resize(n);
  for (size_t k = 0; k < n; ++k) {
    const uint8_t* p = data + k * bytes_per;
    double v = 0.0;
    if (fmt.is_float && bytes_per == 4) {
      float f;
      std::memcpy(&f, p, 4);
      v = f;
    } else if (fmt.is_float) {
      std::memcpy(&v, p, 8);
    } else if (bytes_per == 2) {
      v = static_cast<int16_t>(U16(p)) / 32768.0;
    } else if (bytes_per == 3) {
      int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
      if (s & 0x800000) s -= 0x1000000;
      v = s / 8388608.0;
    } else {
      v = static_cast<int32_t>(U32(p)) / 2147483648.0;
    }
    if (!std::isfinite(v)) throw WavError("non-finite sample in WAV data");
    wave.samples[k] = v;
  }
  if (info != nullptr) *info = fmt;
  return wave;
}

Waveform ReadWav(const std::filesystem::path& path, WavInfo* info) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  try {
    return DecodeWav(bytes, info);
  } catch (const WavError& e) {
    throw WavError(path.string() + ": " + e.what());
  }
}

std::vector<uint8_t> EncodeWav(const Waveform& wave, WavSampleFormat format) {
  const bool is_float = format == WavSampleFormat::kFloat32;
  const int bytes_per = is_float ? 4 : 2;
  const uint32_t data_len = static_cast<uint32_t>(wave.samples.size() * bytes_per);
  std::vector<uint8_t> out;
  out.reserve(44 + data_len);
  PutTag(out, "RIFF");
  Put32(out, 36 + data_len);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  Put32(out, 16);
  Put16(out, is_float ? kFormatFloat : kFormatPcm);
  Put16(out, 1);
  Put32(out, static_cast<uint32_t>(wave.sample_rate));
  Put32(out, static_cast<uint32_t>(wave.sample_rate * bytes_per));
  Put16(out, static_cast<uint16_t>(bytes_per));
  Put16(out, static_cast<uint16_t>(8 * bytes_per));
  PutTag(out, "data");
  Put32(out, data_len);
  for (double v : wave.samples) {
    if (is_float) {
      const float f = static_cast<float>(v);
      uint32_t bits;
      std::memcpy(&bits, &f, 4);
      Put32(out, bits);
    } else {
      // Same scale as the decoder, so a round trip is within half an LSB.
      const double s = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
      Put16(out, static_cast<uint16_t>(static_cast<int16_t>(s)));
    }
  }
  return out;
}

void WriteWav(const std::filesystem::path& path, const Waveform& wave,
              WavSampleFormat format) {
  WriteFileBytes(path, EncodeWav(wave, format));
}

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(is),
                              std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace sbrestore
