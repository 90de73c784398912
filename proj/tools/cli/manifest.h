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

#ifndef SBRESTORE_CLI_MANIFEST_H_
#define SBRESTORE_CLI_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cli/run_config.h"
#include "json.hpp"
#include "sbrestore/factorized.h"

namespace sbrestore::cli {

inline constexpr int kManifestSchema = 1;

std::string Sha256Hex(std::span<const uint8_t> bytes);
std::string Sha256File(const std::filesystem::path& path);

struct PhaseBandStats {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
  double median = 0.0;
  double p999 = 0.0;
  double max = 0.0;
};

struct PhaseOrthoSummary {
  double median = 0.0;
  double p999 = 0.0;
  double max = 0.0;
  int64_t degenerate_cells = 0;
  std::vector<PhaseBandStats> bands;
};

// Statistics of the phase-orthogonalization residual of `x`, overall and in
// bands of `band_hz` starting at 0 Hz.
PhaseOrthoSummary SummarizePhaseOrtho(const FactorizedSpec& x,
                                      const StftParams& params,
                                      int sample_rate,
                                      double band_hz = 2000.0);
nlohmann::ordered_json ToJson(const PhaseOrthoSummary& s);

struct FileRecord {
  std::string path;
  std::string sha256;
};

// Inputs and outputs are named; re-running a manifest maps the same names
// onto the same paths.
struct Manifest {
  std::string command;
  RunConfig config;
  // Positional paths of the command line, by name.
  std::map<std::string, std::string> arguments;
  std::map<std::string, FileRecord> inputs;
  std::map<std::string, FileRecord> outputs;
  // Wall-clock seconds per stage. Not reproducible, so not compared.
  std::vector<std::pair<std::string, double>> timings;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  void AddInput(const std::string& name, const std::filesystem::path& path);
  void AddOutput(const std::string& name, const std::filesystem::path& path);
};

nlohmann::ordered_json ToJson(const Manifest& m);
void WriteManifest(const std::filesystem::path& path, const Manifest& m);
Manifest ReadManifest(const std::filesystem::path& path);

// `<output path>.manifest.json`.
std::filesystem::path ManifestPathFor(const std::filesystem::path& output);

}  // namespace sbrestore::cli

#endif  // SBRESTORE_CLI_MANIFEST_H_
