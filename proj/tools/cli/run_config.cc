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

#include "cli/run_config.h"

#include <fstream>
#include <set>
#include <string>

#include "cli/errors.h"

namespace sbrestore::cli {
namespace {

using Json = nlohmann::json;

void CheckKeys(const Json& j, const std::string& where,
               const std::set<std::string>& allowed) {
  if (!j.is_object()) throw UsageError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw UsageError("unknown configuration key '" + where + "." + key + "'");
    }
  }
}

template <typename T>
void Get(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

nlohmann::ordered_json ToJson(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["task"] = TaskName(cfg.task);
  j["sample_rate"] = cfg.sample_rate;
  j["stft"] = {{"fft_size", cfg.stft.fft_size},
               {"win_length", cfg.stft.win_length},
               {"hop", cfg.stft.hop}};
  j["rho"] = cfg.rho;
  j["beta_max"] = cfg.beta_max;
  j["sigma_fill"] = cfg.sigma_fill;
  j["sampler"] = {{"num_steps", cfg.sampler.num_steps},
                  {"deterministic", cfg.sampler.deterministic},
                  {"clamp_known_region", cfg.sampler.clamp_known_region},
                  {"num_threads", cfg.sampler.num_threads}};
  j["window"] = {{"frames", cfg.window_frames}, {"hop", cfg.window_hop}};
  j["checkpoints"] = cfg.checkpoints;
  j["oracle_ref"] = cfg.oracle_ref;
  j["seed"] = cfg.seed;
  j["degrade"] = {{"cutoff_hz", cfg.cutoff_hz},
                  {"gap_ms", cfg.gap_ms},
                  {"period_s", cfg.period_s}};
  j["pcm16"] = cfg.pcm16;
  j["resample"] = {{"zero_crossings", cfg.resample.zero_crossings},
                   {"kaiser_beta", cfg.resample.kaiser_beta},
                   {"rolloff", cfg.resample.rolloff}};
  const TrainOptions& t = cfg.train;
  const DegradationConfig& d = t.degradation;
  j["train"] = {{"steps", t.steps},
                {"pretrain_steps", t.pretrain_steps},
                {"partitions", t.partitions},
                {"batch_size", t.batch_size},
                {"learning_rate", t.learning_rate},
                {"segments", t.segments},
                {"corpus_dir", t.corpus_dir},
                {"channels", t.channels},
                {"blocks", t.blocks},
                {"embed_hidden", t.embed_hidden},
                {"window_frames", t.window_frames},
                {"frequency_loss_mask", t.frequency_loss_mask},
                {"degradation",
                 {{"sigma_fill", d.sigma_fill},
                  {"min_cutoff_hz", d.min_cutoff_hz},
                  {"max_cutoff_hz", d.max_cutoff_hz},
                  {"min_gap_s", d.min_gap_s},
                  {"max_gap_s", d.max_gap_s},
                  {"bwe_probability", d.bwe_probability}}}};
  j["eval"] = {{"cutoffs_hz", cfg.eval.cutoffs_hz},
               {"gaps_ms", cfg.eval.gaps_ms}};
  return j;
}

void MergeJson(const nlohmann::json& j, RunConfig& cfg) {
  try {
    CheckKeys(j, "config",
              {"task", "sample_rate", "stft", "rho", "beta_max", "sigma_fill",
               "sampler", "window", "checkpoints", "oracle_ref", "seed",
               "degrade", "pcm16", "resample", "train", "eval"});
    if (j.contains("task")) cfg.task = ParseTask(j.at("task").get<std::string>());
    Get(j, "sample_rate", cfg.sample_rate);
    if (j.contains("stft")) {
      const Json& s = j.at("stft");
      CheckKeys(s, "stft", {"fft_size", "win_length", "hop"});
      Get(s, "fft_size", cfg.stft.fft_size);
      Get(s, "win_length", cfg.stft.win_length);
      Get(s, "hop", cfg.stft.hop);
    }
    Get(j, "rho", cfg.rho);
    Get(j, "beta_max", cfg.beta_max);
    Get(j, "sigma_fill", cfg.sigma_fill);
    if (j.contains("sampler")) {
      const Json& s = j.at("sampler");
      CheckKeys(s, "sampler",
                {"num_steps", "deterministic", "clamp_known_region",
                 "num_threads"});
      Get(s, "num_steps", cfg.sampler.num_steps);
      Get(s, "deterministic", cfg.sampler.deterministic);
      Get(s, "clamp_known_region", cfg.sampler.clamp_known_region);
      Get(s, "num_threads", cfg.sampler.num_threads);
    }
    if (j.contains("window")) {
      const Json& w = j.at("window");
      CheckKeys(w, "window", {"frames", "hop"});
      Get(w, "frames", cfg.window_frames);
      Get(w, "hop", cfg.window_hop);
    }
    Get(j, "checkpoints", cfg.checkpoints);
    Get(j, "oracle_ref", cfg.oracle_ref);
    Get(j, "seed", cfg.seed);
    if (j.contains("degrade")) {
      const Json& d = j.at("degrade");
      CheckKeys(d, "degrade", {"cutoff_hz", "gap_ms", "period_s"});
      Get(d, "cutoff_hz", cfg.cutoff_hz);
      Get(d, "gap_ms", cfg.gap_ms);
      Get(d, "period_s", cfg.period_s);
    }
    Get(j, "pcm16", cfg.pcm16);
    if (j.contains("resample")) {
      const Json& r = j.at("resample");
      CheckKeys(r, "resample", {"zero_crossings", "kaiser_beta", "rolloff"});
      Get(r, "zero_crossings", cfg.resample.zero_crossings);
      Get(r, "kaiser_beta", cfg.resample.kaiser_beta);
      Get(r, "rolloff", cfg.resample.rolloff);
    }
    if (j.contains("train")) {
      const Json& t = j.at("train");
      CheckKeys(t, "train",
                {"steps", "pretrain_steps", "partitions", "batch_size",
                 "learning_rate", "segments", "corpus_dir", "channels",
                 "blocks", "embed_hidden", "window_frames",
                 "frequency_loss_mask", "degradation"});
      TrainOptions& o = cfg.train;
      Get(t, "steps", o.steps);
      Get(t, "pretrain_steps", o.pretrain_steps);
      Get(t, "partitions", o.partitions);
      Get(t, "batch_size", o.batch_size);
      Get(t, "learning_rate", o.learning_rate);
      Get(t, "segments", o.segments);
      Get(t, "corpus_dir", o.corpus_dir);
      Get(t, "channels", o.channels);
      Get(t, "blocks", o.blocks);
      Get(t, "embed_hidden", o.embed_hidden);
      Get(t, "window_frames", o.window_frames);
      Get(t, "frequency_loss_mask", o.frequency_loss_mask);
      if (t.contains("degradation")) {
        const Json& d = t.at("degradation");
        CheckKeys(d, "train.degradation",
                  {"sigma_fill", "min_cutoff_hz", "max_cutoff_hz", "min_gap_s",
                   "max_gap_s", "bwe_probability"});
        DegradationConfig& g = o.degradation;
        Get(d, "sigma_fill", g.sigma_fill);
        Get(d, "min_cutoff_hz", g.min_cutoff_hz);
        Get(d, "max_cutoff_hz", g.max_cutoff_hz);
        Get(d, "min_gap_s", g.min_gap_s);
        Get(d, "max_gap_s", g.max_gap_s);
        Get(d, "bwe_probability", g.bwe_probability);
      }
    }
    if (j.contains("eval")) {
      const Json& e = j.at("eval");
      CheckKeys(e, "eval", {"cutoffs_hz", "gaps_ms"});
      Get(e, "cutoffs_hz", cfg.eval.cutoffs_hz);
      Get(e, "gaps_ms", cfg.eval.gaps_ms);
    }
  } catch (const Json::exception& e) {
    throw UsageError(std::string("bad configuration value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open config file " + path.string());
  RunConfig cfg;
  try {
    MergeJson(Json::parse(is, nullptr, true, /*ignore_comments=*/true), cfg);
  } catch (const Json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return cfg;
}

void ValidateRunConfig(const RunConfig& cfg, const std::string& command) {
  const bool all = command.empty();
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw UsageError(what);
  };
  try {
    cfg.stft.Validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  require(cfg.sample_rate > 0, "sample_rate must be positive");
  require(cfg.rho > 0.0 && cfg.rho <= 1.0, "rho must lie in (0, 1]");
  require(cfg.beta_max > 0.0, "beta_max must be positive");
  require(cfg.sigma_fill >= 0.0, "sigma_fill must be nonnegative");
  require(cfg.sampler.num_steps >= 1, "num_steps must be >= 1");
  require(cfg.sampler.num_threads >= 1, "num_threads must be >= 1");
  require(cfg.window_frames >= 0 && cfg.window_hop >= 0,
          "window frames and hop must be nonnegative");
  require(cfg.window_hop == 0 || cfg.window_frames == 0 ||
              cfg.window_hop <= cfg.window_frames,
          "window hop must not exceed the window");
  if (all || (command == "degrade" && cfg.task == Task::kBandwidthExtension)) {
    require(cfg.cutoff_hz > 0.0 && cfg.cutoff_hz < cfg.sample_rate / 2.0,
            "cutoff must lie strictly between 0 and Nyquist");
  }
  require(cfg.gap_ms > 0.0 && cfg.period_s > 0.0,
          "gap length and period must be positive");
  const TrainOptions& t = cfg.train;
  require(t.steps >= 0 && t.pretrain_steps >= 0, "step counts must be >= 0");
  require(t.partitions == 1 || t.partitions == 2 || t.partitions == 4,
          "partitions must be 1, 2 or 4");
  require(t.batch_size >= 1, "batch_size must be >= 1");
  require(t.learning_rate >= 0.0, "learning_rate must be >= 0");
  require(t.segments >= 1, "segments must be >= 1");
  require(t.channels >= 1 && t.blocks >= 0 && t.embed_hidden >= 1 &&
              t.window_frames >= 2,
          "invalid network size");
  if (all || (command == "eval" && cfg.task == Task::kBandwidthExtension)) {
    for (double c : cfg.eval.cutoffs_hz) {
      require(c > 0.0 && c < cfg.sample_rate / 2.0,
              "eval cutoffs must lie strictly between 0 and Nyquist");
    }
  }
  for (double g : cfg.eval.gaps_ms) require(g > 0.0, "eval gaps must be > 0");
}

}  // namespace sbrestore::cli
