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

#include "cli/manifest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "cli/errors.h"
#include "sbrestore/version.h"
#include "sbrestore/wav_io.h"

namespace sbrestore::cli {
namespace {

// Nearest-rank percentile; sorts `v`.
double Percentile(std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double rank = std::ceil(q * static_cast<double>(v.size()));
  const size_t idx =
      static_cast<size_t>(std::clamp(rank, 1.0, static_cast<double>(v.size()))) - 1;
  return v[idx];
}

void Summarize(std::vector<double>& v, double& median, double& p999,
               double& max) {
  median = Percentile(v, 0.5);
  p999 = Percentile(v, 0.999);
  max = v.empty() ? 0.0 : v.back();
}

}  // namespace

std::string Sha256Hex(std::span<const uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[k]);
    hex += buf;
  }
  return hex;
}

std::string Sha256File(const std::filesystem::path& path) {
  return Sha256Hex(ReadFileBytes(path));
}

PhaseOrthoSummary SummarizePhaseOrtho(const FactorizedSpec& x,
                                      const StftParams& params,
                                      int sample_rate, double band_hz) {
  const Plane err = PhaseOrthoErrorMap(x);
  PhaseOrthoSummary s;
  std::vector<double> all(err.data(), err.data() + err.size());
  Summarize(all, s.median, s.p999, s.max);
  for (Eigen::Index k = 0; k < err.size(); ++k) {
    const double c = x.cos().data()[k];
    const double n = x.sin().data()[k];
    if (std::hypot(c, n) < kPhaseNormFloor) ++s.degenerate_cells;
  }
  const double nyquist = sample_rate / 2.0;
  for (double lo = 0.0; lo < nyquist; lo += band_hz) {
    const double hi = std::min(lo + band_hz, nyquist);
    PhaseBandStats b;
    b.lo_hz = lo;
    b.hi_hz = hi;
    std::vector<double> vals;
    for (int i = 0; i < err.rows(); ++i) {
      const double f = SubbandFrequency(i, params, sample_rate);
      const bool last = hi >= nyquist;
      if (f >= lo && (f < hi || (last && f <= hi))) {
        for (int j = 0; j < err.cols(); ++j) vals.push_back(err(i, j));
      }
    }
    Summarize(vals, b.median, b.p999, b.max);
    s.bands.push_back(b);
  }
  return s;
}

nlohmann::ordered_json ToJson(const PhaseOrthoSummary& s) {
  nlohmann::ordered_json j;
  j["median"] = s.median;
  j["p99_9"] = s.p999;
  j["max"] = s.max;
  j["degenerate_cells"] = s.degenerate_cells;
  nlohmann::ordered_json bands = nlohmann::ordered_json::array();
  for (const PhaseBandStats& b : s.bands) {
    bands.push_back({{"lo_hz", b.lo_hz},
                     {"hi_hz", b.hi_hz},
                     {"median", b.median},
                     {"p99_9", b.p999},
                     {"max", b.max}});
  }
  j["bands"] = bands;
  return j;
}

void Manifest::AddInput(const std::string& name,
                        const std::filesystem::path& path) {
  inputs[name] = {path.string(), Sha256File(path)};
}

void Manifest::AddOutput(const std::string& name,
                         const std::filesystem::path& path) {
  outputs[name] = {path.string(), Sha256File(path)};
}

nlohmann::ordered_json ToJson(const Manifest& m) {
  nlohmann::ordered_json j;
  j["schema_version"] = kManifestSchema;
  j["library_version"] = kVersion;
  j["command"] = m.command;
  j["config"] = ToJson(m.config);
  j["arguments"] = m.arguments;
  auto files = [](const std::map<std::string, FileRecord>& records) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [name, r] : records) {
      out[name] = {{"path", r.path}, {"sha256", r.sha256}};
    }
    return out;
  };
  j["inputs"] = files(m.inputs);
  j["outputs"] = files(m.outputs);
  j["details"] = m.details;
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  for (const auto& [stage, secs] : m.timings) t[stage] = secs;
  j["timings"] = t;
  return j;
}

void WriteManifest(const std::filesystem::path& path, const Manifest& m) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot write " + path.string());
  os << ToJson(m).dump(2) << "\n";
}

Manifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open manifest " + path.string());
  Manifest m;
  try {
    const nlohmann::json j = nlohmann::json::parse(is);
    if (j.at("schema_version").get<int>() != kManifestSchema) {
      throw DataError("unsupported manifest schema");
    }
    m.command = j.at("command").get<std::string>();
    MergeJson(j.at("config"), m.config);
    m.arguments = j.at("arguments").get<std::map<std::string, std::string>>();
    auto files = [](const nlohmann::json& records) {
      std::map<std::string, FileRecord> out;
      for (const auto& [name, r] : records.items()) {
        out[name] = {r.at("path").get<std::string>(),
                     r.at("sha256").get<std::string>()};
      }
      return out;
    };
    m.inputs = files(j.at("inputs"));
    m.outputs = files(j.at("outputs"));
    if (j.contains("details")) {
      m.details = nlohmann::ordered_json::parse(j.at("details").dump());
    }
    if (j.contains("timings")) {
      for (const auto& [stage, seconds] : j.at("timings").items()) {
        m.timings.emplace_back(stage, seconds.get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": malformed manifest: " + e.what());
  }
  return m;
}

std::filesystem::path ManifestPathFor(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

}  // namespace sbrestore::cli
