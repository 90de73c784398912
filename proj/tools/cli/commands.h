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

#ifndef SBRESTORE_CLI_COMMANDS_H_
#define SBRESTORE_CLI_COMMANDS_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cli/manifest.h"
#include "cli/run_config.h"

namespace sbrestore::cli {

// One subcommand invocation: the resolved configuration plus positional
// paths by name ("input", "output", "mask", ...).
struct Job {
  std::string command;
  RunConfig config;
  std::map<std::string, std::string> arguments;
};

// Each command fills `manifest` with inputs, outputs, timings and details.
// Errors are reported by throwing UsageError, DataError or NumericalError.
// The return value is the exit code for outcomes that are not exceptions
// (eval with skipped files, failed round-trip checks).
int RunDegrade(const Job& job, Manifest& manifest, std::ostream& log);
int RunRestore(const Job& job, Manifest& manifest, std::ostream& log);
int RunTrainToy(const Job& job, Manifest& manifest, std::ostream& log);
int RunEval(const Job& job, Manifest& manifest, std::ostream& log);
int RunRoundtripCheck(const Job& job, Manifest& manifest, std::ostream& log);

// Dispatches on job.command and writes the manifest when the command has a
// primary output.
int RunJob(const Job& job, std::ostream& log);

// Command-line entry point. `args` excludes the program name.
int RunMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);
int RunMain(int argc, char** argv);

// Paths of the per-partition checkpoints written for `output`: the path
// itself for one partition, else `<stem>_p<k><ext>` next to it.
std::vector<std::string> PartitionCheckpointPaths(const std::string& output,
                                                  int partitions);

}  // namespace sbrestore::cli

#endif  // SBRESTORE_CLI_COMMANDS_H_
