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

#include "cli/commands.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cli/errors.h"
#include "cli/sidecar.h"
#include "sbrestore/bridge.h"
#include "sbrestore/checkpoint.h"
#include "sbrestore/corpus.h"
#include "sbrestore/denoiser.h"
#include "sbrestore/factorized.h"
#include "sbrestore/metrics.h"
#include "sbrestore/resample.h"
#include "sbrestore/sampler.h"
#include "sbrestore/toy_net.h"
#include "sbrestore/train.h"
#include "sbrestore/version.h"
#include "sbrestore/wav_io.h"

namespace sbrestore::cli {
namespace {

namespace fs = std::filesystem;

class StageTimer {
 public:
  explicit StageTimer(Manifest& m)
      : manifest_(m), start_(std::chrono::steady_clock::now()) {}

  void Mark(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    manifest_.timings.emplace_back(
        stage, std::chrono::duration<double>(now - start_).count());
    start_ = now;
  }

 private:
  Manifest& manifest_;
  std::chrono::steady_clock::time_point start_;
};

const std::string& Arg(const Job& job, const std::string& name) {
  const auto it = job.arguments.find(name);
  if (it == job.arguments.end() || it->second.empty()) {
    throw UsageError(job.command + ": missing argument '" + name + "'");
  }
  return it->second;
}

std::string OptionalArg(const Job& job, const std::string& name) {
  const auto it = job.arguments.find(name);
  return it == job.arguments.end() ? std::string() : it->second;
}

void RequireFile(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) {
    throw DataError(what + " '" + path + "' does not exist");
  }
}

// Reads a mono WAV and resamples it to `rate` if needed.
Waveform LoadWave(const std::string& path, int rate,
                  const ResampleQuality& quality, bool* resampled = nullptr) {
  RequireFile(path, "input file");
  Waveform w;
  try {
    w = ReadWav(path);
  } catch (const WavError& e) {
    throw DataError(e.what());
  }
  if (resampled != nullptr) *resampled = w.sample_rate != rate;
  if (w.sample_rate != rate) w = Resample(w, rate, quality);
  return w;
}

void StoreWave(const std::string& path, const Waveform& w, bool pcm16) {
  for (double v : w.samples) {
    if (!std::isfinite(v)) throw NumericalError("non-finite output sample");
  }
  WriteWav(path, w, pcm16 ? WavSampleFormat::kPcm16 : WavSampleFormat::kFloat32);
}

void RequireLongEnough(const Waveform& w, const StftParams& p,
                       const std::string& path) {
  if (w.size() < p.win_length || w.size() <= p.fft_size / 2) {
    throw DataError(path + " is shorter than one STFT window (" +
                    std::to_string(p.win_length) + " samples)");
  }
}

void RequireFinite(const FactorizedSpec& x) {
  for (const Plane& c : x.ch) {
    if (!c.allFinite()) {
      throw NumericalError("sampler produced non-finite values");
    }
  }
}

std::string Label(Task task, double value) {
  char buf[64];
  if (task == Task::kBandwidthExtension) {
    std::snprintf(buf, sizeof(buf), "bwe_%.0fhz", value);
  } else {
    std::snprintf(buf, sizeof(buf), "inpaint_%.0fms", value);
  }
  return buf;
}

std::map<std::string, fs::path> WavStems(const fs::path& dir) {
  std::map<std::string, fs::path> stems;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".wav") stems[e.path().stem().string()] = e.path();
  }
  return stems;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> PartitionCheckpointPaths(const std::string& output,
                                                  int partitions) {
  if (partitions == 1) return {output};
  const fs::path p(output);
  std::vector<std::string> out;
  for (int k = 0; k < partitions; ++k) {
    fs::path q = p.parent_path() /
                 (p.stem().string() + "_p" + std::to_string(k) +
                  p.extension().string());
    out.push_back(q.string());
  }
  return out;
}

int RunDegrade(const Job& job, Manifest& manifest, std::ostream& log) {
  const RunConfig& cfg = job.config;
  const std::string& input = Arg(job, "input");
  const std::string& output = Arg(job, "output");
  StageTimer timer(manifest);
  bool resampled = false;
  const Waveform wave = LoadWave(input, cfg.sample_rate, cfg.resample, &resampled);
  RequireLongEnough(wave, cfg.stft, input);
  manifest.AddInput("input", input);
  timer.Mark("load");

  MaskSidecar side;
  side.task = cfg.task;
  side.sample_rate = cfg.sample_rate;
  side.num_samples = wave.size();
  side.stft = cfg.stft;
  side.num_subbands = cfg.stft.num_subbands();
  side.num_frames = NumFrames(wave.size(), cfg.stft);
  if (cfg.task == Task::kBandwidthExtension) {
    side.cutoff_hz = cfg.cutoff_hz;
    side.cutoff_subband = CutoffSubband(cfg.cutoff_hz, cfg.stft, cfg.sample_rate);
    if (side.cutoff_subband >= side.num_subbands - 1) {
      throw UsageError("cutoff leaves no subband to extend");
    }
  } else if (cfg.task == Task::kInpainting) {
    side.gap_ms = cfg.gap_ms;
    side.period_s = cfg.period_s;
    side.gaps = InpaintGapGrid(wave.size(), cfg.sample_rate, cfg.gap_ms,
                               cfg.period_s, cfg.stft);
    if (side.gaps.empty()) {
      throw DataError("input is too short for a " + FormatDouble(cfg.gap_ms) +
                      " ms gap every " + FormatDouble(cfg.period_s) + " s");
    }
  }

  if (cfg.task == Task::kNone && !resampled) {
    // Identity: the file itself, untouched.
    WriteFileBytes(output, ReadFileBytes(input));
  } else {
    ComplexSpec spec = Stft(wave.samples, cfg.stft);
    const MaskSpec mask = side.ToMask();
    spec.re = mask.cells.select(0.0, spec.re);
    spec.im = mask.cells.select(0.0, spec.im);
    Waveform out;
    out.sample_rate = cfg.sample_rate;
    out.samples = Istft(spec, cfg.stft, wave.size());
    StoreWave(output, out, cfg.pcm16);
  }
  const fs::path sidecar = SidecarPathFor(output);
  WriteSidecar(sidecar, side);
  timer.Mark("degrade");

  manifest.AddOutput("degraded", output);
  manifest.AddOutput("sidecar", sidecar);
  manifest.details["resampled"] = resampled;
  manifest.details["masked_cells"] = side.ToMask().CountCells();
  if (cfg.task == Task::kBandwidthExtension) {
    manifest.details["cutoff_subband"] = side.cutoff_subband;
  }
  if (cfg.task == Task::kInpainting) {
    manifest.details["gap_count"] = side.gaps.size();
  }
  log << "degrade: " << TaskName(cfg.task) << ", " << wave.size()
      << " samples at " << cfg.sample_rate << " Hz -> " << output << "\n";
  return kExitOk;
}

int RunRestore(const Job& job, Manifest& manifest, std::ostream& log) {
  RunConfig cfg = job.config;
  const std::string& input = Arg(job, "input");
  const std::string& output = Arg(job, "output");
  std::string mask_path = OptionalArg(job, "mask");
  if (mask_path.empty()) mask_path = SidecarPathFor(input).string();
  StageTimer timer(manifest);

  const MaskSidecar side = ReadSidecar(mask_path);
  RequireFile(input, "degraded file");
  Waveform wave;
  try {
    wave = ReadWav(input);
  } catch (const WavError& e) {
    throw DataError(e.what());
  }
  if (wave.sample_rate != side.sample_rate || wave.size() != side.num_samples) {
    throw DataError("mask sidecar does not match " + input + " (" +
                    std::to_string(wave.size()) + " samples at " +
                    std::to_string(wave.sample_rate) + " Hz)");
  }
  manifest.AddInput("degraded", input);
  manifest.AddInput("sidecar", mask_path);
  const StftParams& params = side.stft;

  std::shared_ptr<const Denoiser> denoiser;
  double rho = cfg.rho;
  double beta_max = cfg.beta_max;
  nlohmann::ordered_json denoiser_info;
  if (!cfg.oracle_ref.empty()) {
    const Waveform ref =
        LoadWave(cfg.oracle_ref, side.sample_rate, cfg.resample);
    if (ref.size() != side.num_samples) {
      throw DataError("oracle reference length differs from the input");
    }
    manifest.AddInput("oracle_ref", cfg.oracle_ref);
    denoiser = std::make_shared<OracleDenoiser>(
        Factorize(Stft(ref.samples, params), rho), BridgeSchedule(beta_max));
    // The resynthesized degraded file cannot carry the clean values of the
    // cells next to the mask, so the oracle identity is checked unclamped.
    cfg.sampler.clamp_known_region = false;
    denoiser_info["kind"] = "oracle";
  } else {
    if (cfg.checkpoints.empty()) {
      throw UsageError("restore needs --checkpoint (or --oracle-ref)");
    }
    std::vector<PartitionRouter::Entry> entries;
    nlohmann::ordered_json intervals = nlohmann::ordered_json::array();
    for (size_t k = 0; k < cfg.checkpoints.size(); ++k) {
      const std::string& path = cfg.checkpoints[k];
      RequireFile(path, "checkpoint");
      Checkpoint ckpt;
      try {
        ckpt = LoadCheckpoint(path);
      } catch (const std::runtime_error& e) {
        throw DataError(e.what());
      }
      const CheckpointMeta& m = ckpt.meta;
      if (!(m.stft == params) || m.sample_rate != side.sample_rate) {
        throw DataError("checkpoint " + path +
                        " was trained with different STFT parameters or "
                        "sample rate than the input");
      }
      if (k == 0) {
        rho = m.rho;
        beta_max = m.beta_max;
      } else if (m.rho != rho || m.beta_max != beta_max) {
        throw DataError("checkpoints disagree on rho or beta_max");
      }
      manifest.AddInput("checkpoint_" + std::to_string(k), path);
      entries.emplace_back(m.interval,
                           std::make_shared<ToyDenoiser>(ckpt.net));
      intervals.push_back({m.interval.lo, m.interval.hi});
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first.lo < b.first.lo; });
    try {
      if (entries.size() == 1 && entries[0].first == TimeInterval{0.0, 1.0}) {
        denoiser = entries[0].second;
      } else {
        denoiser = std::make_shared<PartitionRouter>(std::move(entries));
      }
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("checkpoint intervals: ") + e.what());
    }
    denoiser_info["kind"] = "toy";
    denoiser_info["intervals"] = intervals;
  }
  timer.Mark("load");

  const MaskSpec mask = side.ToMask();
  const FactorizedSpec x = Factorize(Stft(wave.samples, params), rho);
  Rng rng(cfg.seed);
  const FactorizedSpec x1 = Degrade(x, mask, cfg.sigma_fill, rng);
  const int full = x.num_frames();
  int window = cfg.window_frames;
  if (window == 0) window = denoiser->window_frames();
  if (window == 0) window = full;
  if (denoiser->window_frames() > 0 && window > denoiser->window_frames()) {
    throw UsageError("window of " + std::to_string(window) +
                     " frames exceeds the checkpoint window (" +
                     std::to_string(denoiser->window_frames()) + ")");
  }
  const int hop = cfg.window_hop > 0 ? cfg.window_hop : std::max(1, window / 2);
  WindowPlan plan;
  try {
    plan = PlanWindows(full, window, hop);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("window plan invalid: ") + e.what());
  }
  const BridgeSchedule schedule(beta_max);
  const FactorizedSpec restored =
      RestoreLong(schedule, x1, mask, *denoiser, cfg.sampler, plan, rng);
  RequireFinite(restored);
  timer.Mark("sample");

  const PhaseOrthoSummary phase =
      SummarizePhaseOrtho(restored, params, side.sample_rate);
  PhaseOrthoStats stats;
  const ComplexSpec spec = Reconstruct(restored, true, &stats);
  Waveform out;
  out.sample_rate = side.sample_rate;
  out.samples = Istft(spec, params, side.num_samples);
  StoreWave(output, out, cfg.pcm16);
  timer.Mark("synthesize");
  manifest.AddOutput("restored", output);

  manifest.details["denoiser"] = denoiser_info;
  manifest.details["rho"] = rho;
  manifest.details["beta_max"] = beta_max;
  manifest.details["clamp_known_region"] = cfg.sampler.clamp_known_region;
  manifest.details["window_plan"] = {{"full_width", plan.full_width},
                                     {"window", plan.effective_window()},
                                     {"hop", plan.hop},
                                     {"window_count", plan.window_count()},
                                     {"offsets", plan.offsets},
                                     {"padding", plan.padding}};
  manifest.details["phase_ortho"] = ToJson(phase);
  log << "restore: " << TaskName(side.task) << ", " << full << " frames in "
      << plan.window_count() << " window(s), " << cfg.sampler.num_steps
      << " steps; phase-ortho residual median " << phase.median << ", p99.9 "
      << phase.p999 << ", max " << phase.max << "\n";
  return kExitOk;
}

int RunTrainToy(const Job& job, Manifest& manifest, std::ostream& log) {
  const RunConfig& cfg = job.config;
  const TrainOptions& opt = cfg.train;
  const std::string& output = Arg(job, "output");
  StageTimer timer(manifest);

  const int seg_len = MinSamplesForFrames(opt.window_frames, cfg.stft);
  std::vector<Waveform> waves;
  if (!opt.corpus_dir.empty()) {
    if (!fs::is_directory(opt.corpus_dir)) {
      throw DataError("corpus directory '" + opt.corpus_dir + "' not found");
    }
    for (const auto& [stem, path] : WavStems(opt.corpus_dir)) {
      const Waveform w = LoadWave(path.string(), cfg.sample_rate, cfg.resample);
      manifest.AddInput("corpus/" + stem, path);
      for (int start = 0; start + seg_len <= w.size(); start += seg_len) {
        Waveform seg;
        seg.sample_rate = cfg.sample_rate;
        seg.samples.assign(w.samples.begin() + start,
                           w.samples.begin() + start + seg_len);
        waves.push_back(std::move(seg));
      }
    }
  } else {
    SynthConfig synth;
    synth.sample_rate = cfg.sample_rate;
    synth.num_samples = seg_len;
    waves = SynthesizeCorpus(synth, opt.segments, cfg.seed);
  }
  if (waves.empty()) throw DataError("training corpus is empty");
  const std::vector<FactorizedSpec> data =
      FactorizeCorpus(waves, cfg.stft, cfg.rho);
  timer.Mark("corpus");

  ToyNetConfig net_cfg;
  net_cfg.channels = opt.channels;
  net_cfg.blocks = opt.blocks;
  net_cfg.embed_hidden = opt.embed_hidden;
  net_cfg.window_frames = opt.window_frames;
  TrainConfig tc;
  tc.steps = opt.steps;
  tc.batch_size = opt.batch_size;
  tc.learning_rate = opt.learning_rate;
  tc.frequency_loss_mask = opt.frequency_loss_mask;
  tc.seed = cfg.seed;
  tc.degradation = opt.degradation;
  tc.stft = cfg.stft;
  tc.sample_rate = cfg.sample_rate;
  tc.beta_max = cfg.beta_max;

  const std::string loss_path = output + ".loss.tsv";
  std::ostringstream loss_log;
  loss_log << "partition\tstep\tloss\n";
  double running = 0.0;
  int count = 0;
  std::vector<PartitionedNet> nets;
  try {
    nets = TrainPartitioned(
        net_cfg, data, tc, opt.partitions, opt.pretrain_steps,
        [&](int part, int step, double loss) {
          if (!std::isfinite(loss)) {
            throw NumericalError("training loss became non-finite");
          }
          loss_log << part << "\t" << step << "\t" << FormatDouble(loss) << "\n";
          running += loss;
          if (++count == 100) {
            log << "train-toy: partition " << part << " step " << step + 1
                << " mean loss " << running / count << "\n";
            running = 0.0;
            count = 0;
          }
        });
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("training failed: ") + e.what());
  }
  timer.Mark("train");

  const std::vector<std::string> paths =
      PartitionCheckpointPaths(output, opt.partitions);
  nlohmann::ordered_json parts = nlohmann::ordered_json::array();
  for (size_t k = 0; k < nets.size(); ++k) {
    CheckpointMeta meta;
    meta.stft = cfg.stft;
    meta.sample_rate = cfg.sample_rate;
    meta.rho = cfg.rho;
    meta.beta_max = cfg.beta_max;
    meta.interval = nets[k].interval;
    SaveCheckpoint(paths[k], nets[k].net, meta);
    manifest.AddOutput("checkpoint_" + std::to_string(k), paths[k]);
    const std::vector<double>& l = nets[k].log.loss;
    parts.push_back({{"path", paths[k]},
                     {"interval", {nets[k].interval.lo, nets[k].interval.hi}},
                     {"final_loss", l.empty() ? 0.0 : l.back()}});
  }
  {
    std::ofstream os(loss_path, std::ios::trunc);
    if (!os) throw DataError("cannot write " + loss_path);
    os << loss_log.str();
  }
  manifest.AddOutput("loss_log", loss_path);
  timer.Mark("save");
  manifest.details["segments"] = waves.size();
  manifest.details["parameters"] = nets.front().net.num_params();
  manifest.details["partitions"] = parts;
  log << "train-toy: " << waves.size() << " segments, "
      << nets.front().net.num_params() << " parameters, " << nets.size()
      << " checkpoint(s)\n";
  return kExitOk;
}

int RunEval(const Job& job, Manifest& manifest, std::ostream& log) {
  const RunConfig& cfg = job.config;
  const fs::path ref_dir = Arg(job, "ref_dir");
  const fs::path restored_dir = Arg(job, "restored_dir");
  const std::string prefix = Arg(job, "output");
  if (!fs::is_directory(ref_dir) || !fs::is_directory(restored_dir)) {
    throw DataError("reference and restored directories must exist");
  }
  if (cfg.task == Task::kNone) {
    throw UsageError("eval needs --task bwe or --task inpaint");
  }
  StageTimer timer(manifest);
  const std::vector<double>& values = cfg.task == Task::kBandwidthExtension
                                          ? cfg.eval.cutoffs_hz
                                          : cfg.eval.gaps_ms;
  if (values.empty()) throw UsageError("no evaluation conditions configured");

  const std::map<std::string, fs::path> refs = WavStems(ref_dir);
  std::map<std::string, Waveform> ref_waves;
  for (const auto& [stem, path] : refs) {
    ref_waves[stem] = LoadWave(path.string(), cfg.sample_rate, cfg.resample);
    manifest.AddInput("ref/" + stem, path);
  }
  EvalReport report;
  bool skipped_any = false;
  for (double value : values) {
    EvalSection section;
    section.label = Label(cfg.task, value);
    section.task = cfg.task;
    if (cfg.task == Task::kBandwidthExtension) {
      section.cutoff_hz = value;
    } else {
      section.gap_ms = value;
      section.period_s = cfg.period_s;
    }
    const fs::path dir = fs::is_directory(restored_dir / section.label)
                             ? restored_dir / section.label
                             : restored_dir;
    const std::map<std::string, fs::path> restored = WavStems(dir);
    for (const auto& [stem, path] : refs) {
      if (!restored.contains(stem)) section.skipped.push_back(stem + " (no restored file)");
    }
    for (const auto& [stem, path] : restored) {
      if (!refs.contains(stem)) {
        section.skipped.push_back(stem + " (no reference file)");
        continue;
      }
      const Waveform est = LoadWave(path.string(), cfg.sample_rate, cfg.resample);
      manifest.AddInput("restored/" + section.label + "/" + stem, path);
      EvalEntry e;
      try {
        e = cfg.task == Task::kBandwidthExtension
                ? EvalProtocolBwe(ref_waves[stem], est, value, cfg.stft)
                : EvalProtocolInpaint(ref_waves[stem], est, value,
                                      cfg.period_s, cfg.stft);
      } catch (const std::invalid_argument& err) {
        section.skipped.push_back(stem + " (" + err.what() + ")");
        continue;
      }
      e.file = stem;
      section.entries.push_back(e);
    }
    for (const std::string& s : section.skipped) {
      log << "eval: " << section.label << ": skipped " << s << "\n";
    }
    skipped_any |= !section.skipped.empty();
    const EvalEntry mean = section.Mean();
    log << "eval: " << section.label << ": " << section.entries.size()
        << " file(s), mean LSD " << mean.lsd << ", region LSD "
        << mean.region_lsd << "\n";
    report.sections.push_back(std::move(section));
  }
  timer.Mark("eval");
  const std::string txt = prefix + ".txt";
  const std::string json = prefix + ".json";
  {
    std::ofstream os(txt, std::ios::trunc);
    if (!os) throw DataError("cannot write " + txt);
    os << FormatReportText(report);
  }
  {
    std::ofstream os(json, std::ios::trunc);
    if (!os) throw DataError("cannot write " + json);
    os << FormatReportJson(report);
  }
  manifest.AddOutput("report_txt", txt);
  manifest.AddOutput("report_json", json);
  return skipped_any ? kExitData : kExitOk;
}

int RunRoundtripCheck(const Job& job, Manifest& manifest, std::ostream& log) {
  const RunConfig& cfg = job.config;
  const std::string& input = Arg(job, "input");
  const std::string report = OptionalArg(job, "report");
  RequireFile(input, "input file");
  Waveform w;
  try {
    w = ReadWav(input);
  } catch (const WavError& e) {
    log << "roundtrip-check: FAIL parse: " << e.what() << "\n";
    throw DataError(e.what());
  }
  RequireLongEnough(w, cfg.stft, input);
  manifest.AddInput("input", input);

  const ComplexSpec spec = Stft(w.samples, cfg.stft);
  const std::vector<double> back = Istft(spec, cfg.stft, w.size());
  double stft_err = 0.0;
  for (int k = 0; k < w.size(); ++k) {
    stft_err = std::max(stft_err, std::abs(back[k] - w.samples[k]));
  }
  const FactorizedSpec x = Factorize(spec, cfg.rho);
  PhaseOrthoStats stats;
  const ComplexSpec rec = Reconstruct(x, true, &stats);
  const double fact_err =
      ((rec.re - spec.re).square() + (rec.im - spec.im).square()).sqrt().maxCoeff();
  const PhaseOrthoSummary phase = SummarizePhaseOrtho(x, cfg.stft, w.sample_rate);

  const bool stft_ok = stft_err < 1e-4;
  const bool fact_ok = fact_err < 1e-6;
  const bool phase_ok = phase.median < 1e-10;
  const bool pass = stft_ok && fact_ok && phase_ok;
  auto verdict = [](bool ok) { return ok ? "ok" : "FAIL"; };
  log << "roundtrip-check: " << input << "\n"
      << "  stft round-trip max error      " << stft_err << " ("
      << verdict(stft_ok) << ", < 1e-4)\n"
      << "  factorization max entry error  " << fact_err << " ("
      << verdict(fact_ok) << ", < 1e-6)\n"
      << "  phase-ortho residual median    " << phase.median << " ("
      << verdict(phase_ok) << ", < 1e-10), p99.9 " << phase.p999 << ", max "
      << phase.max << "\n"
      << "  result: " << (pass ? "PASS" : "FAIL") << "\n";
  if (!report.empty()) {
    nlohmann::ordered_json j;
    j["input"] = input;
    j["sample_rate"] = w.sample_rate;
    j["num_samples"] = w.size();
    j["stft_max_error"] = stft_err;
    j["factorization_max_error"] = fact_err;
    j["phase_ortho"] = ToJson(phase);
    j["pass"] = pass;
    std::ofstream os(report, std::ios::trunc);
    if (!os) throw DataError("cannot write " + report);
    os << j.dump(2) << "\n";
    manifest.AddOutput("report", report);
  }
  return pass ? kExitOk : kExitNumerical;
}

int RunJob(const Job& job, std::ostream& log) {
  ValidateRunConfig(job.config, job.command);
  Manifest manifest;
  manifest.command = job.command;
  manifest.config = job.config;
  manifest.arguments = job.arguments;
  int code = kExitOk;
  std::string primary;
  if (job.command == "degrade") {
    code = RunDegrade(job, manifest, log);
    primary = Arg(job, "output");
  } else if (job.command == "restore") {
    code = RunRestore(job, manifest, log);
    primary = Arg(job, "output");
  } else if (job.command == "train-toy") {
    code = RunTrainToy(job, manifest, log);
    primary = Arg(job, "output");
  } else if (job.command == "eval") {
    code = RunEval(job, manifest, log);
    primary = Arg(job, "output");
  } else if (job.command == "roundtrip-check") {
    code = RunRoundtripCheck(job, manifest, log);
    primary = OptionalArg(job, "report");
  } else {
    throw UsageError("unknown command '" + job.command + "'");
  }
  if (!primary.empty()) WriteManifest(ManifestPathFor(primary), manifest);
  return code;
}

namespace {

int Rerun(const std::string& path, std::ostream& out, std::ostream& err) {
  const Manifest old = ReadManifest(path);
  for (const auto& [name, rec] : old.inputs) {
    if (!fs::is_regular_file(rec.path) || Sha256File(rec.path) != rec.sha256) {
      throw DataError("input '" + name + "' (" + rec.path +
                      ") is missing or changed since the manifest was written");
    }
  }
  const Job job{old.command, old.config, old.arguments};
  const int code = RunJob(job, err);
  int mismatches = 0;
  for (const auto& [name, rec] : old.outputs) {
    const bool same =
        fs::is_regular_file(rec.path) && Sha256File(rec.path) == rec.sha256;
    if (!same) {
      err << "rerun: output '" << name << "' (" << rec.path << ") differs\n";
      ++mismatches;
    }
  }
  if (mismatches > 0) {
    throw NumericalError(std::to_string(mismatches) +
                         " output(s) not reproduced");
  }
  out << "rerun: reproduced " << old.outputs.size() << " output(s) of "
      << old.command << "\n";
  return code;
}

template <typename T>
void Apply(const std::optional<T>& v, T& dst) {
  if (v) dst = *v;
}

}  // namespace

int RunMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Spectrogram-domain audio restoration with a bridge sampler"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(0, 1);

  std::string config_path, from_manifest;
  std::optional<std::string> task;
  std::optional<uint64_t> seed;
  std::optional<int> steps, sample_rate, fft_size, win_length, stft_hop, window,
      hop, threads, partitions, pretrain_steps, segments, batch_size, channels,
      blocks, train_window;
  std::optional<double> cutoff_hz, gap_ms, period_s, rho, beta_max,
      sigma_fill, lr;
  std::optional<std::string> oracle_ref, corpus_dir;
  std::vector<std::string> checkpoints;
  std::vector<double> cutoffs, gaps;
  bool deterministic = false, no_clamp = false, pcm16 = false,
       freq_loss_mask = false;

  app.add_option("--from-manifest", from_manifest,
                 "Re-run the command recorded in a manifest and verify that "
                 "every output digest is reproduced");
  app.add_option("--config", config_path, "JSON run-configuration file");
  app.add_option("--task", task, "bwe, inpaint or none");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--steps", steps,
                 "Sampling steps (restore) or training steps (train-toy)");
  app.add_option("--cutoff-hz", cutoff_hz, "Bandwidth-extension cutoff");
  app.add_option("--gap-ms", gap_ms, "Inpainting gap length");
  app.add_option("--period-s", period_s, "Inpainting gap period");
  app.add_option("--window", window, "MultiDiffusion window in frames");
  app.add_option("--hop", hop, "MultiDiffusion window hop in frames");
  app.add_option("--sample-rate", sample_rate, "Working sample rate");
  app.add_option("--fft-size", fft_size, "STFT size");
  app.add_option("--win-length", win_length, "STFT window length");
  app.add_option("--stft-hop", stft_hop, "STFT hop in samples");
  app.add_option("--rho", rho, "Magnitude compression exponent");
  app.add_option("--beta-max", beta_max, "Bridge schedule scale");
  app.add_option("--sigma-fill", sigma_fill, "Std of the masked-cell fill");
  app.add_option("--threads", threads, "MultiDiffusion worker threads");
  app.add_flag("--deterministic", deterministic,
               "Use posterior means instead of sampling");
  app.add_flag("--no-clamp", no_clamp,
               "Do not reset known cells after each step");
  app.add_option("--checkpoint", checkpoints,
                 "Checkpoint file; repeat for partitioned checkpoints");
  app.add_option("--oracle-ref", oracle_ref,
                 "Clean reference for the oracle denoiser (testing)");
  app.add_flag("--pcm16", pcm16, "Write 16-bit PCM instead of 32-bit float");
  app.add_option("--partitions", partitions, "t-range partitions: 1, 2 or 4");
  app.add_option("--pretrain-steps", pretrain_steps,
                 "Full-range steps before partition fine-tuning");
  app.add_option("--segments", segments, "Synthetic corpus size");
  app.add_option("--corpus-dir", corpus_dir, "Directory of training WAVs");
  app.add_option("--lr", lr, "Learning rate");
  app.add_option("--batch-size", batch_size, "Training batch size");
  app.add_option("--channels", channels, "Toy network width");
  app.add_option("--blocks", blocks, "Toy network residual blocks");
  app.add_option("--train-window", train_window,
                 "Training segment width in frames");
  app.add_flag("--frequency-loss-mask", freq_loss_mask,
               "Ignore subbands above each segment's highest active one");
  app.add_option("--cutoffs", cutoffs, "Eval cutoff list (Hz)")->delimiter(',');
  app.add_option("--gaps", gaps, "Eval gap list (ms)")->delimiter(',');

  std::map<std::string, std::string> positional;
  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };
  CLI::App* degrade = sub("degrade", "Apply a bandwidth or gap mask to a WAV");
  degrade->add_option("input", positional["input"], "Clean WAV")->required();
  degrade->add_option("output", positional["output"], "Degraded WAV")->required();
  CLI::App* restore = sub("restore", "Restore a degraded WAV");
  restore->add_option("input", positional["input"], "Degraded WAV")->required();
  restore->add_option("output", positional["output"], "Restored WAV")->required();
  restore->add_option("--mask", positional["mask"],
                      "Mask sidecar (default <input>.mask.json)");
  CLI::App* train = sub("train-toy", "Train the toy denoiser");
  train->add_option("output", positional["output"], "Checkpoint path")->required();
  CLI::App* eval = sub("eval", "Score restored files against references");
  eval->add_option("ref_dir", positional["ref_dir"], "Reference WAVs")->required();
  eval->add_option("restored_dir", positional["restored_dir"],
                   "Restored WAVs, optionally one subdirectory per condition")
      ->required();
  eval->add_option("output", positional["output"],
                   "Report prefix (.txt and .json are appended)")
      ->required();
  CLI::App* roundtrip =
      sub("roundtrip-check", "Check STFT and factorization invertibility");
  roundtrip->add_option("input", positional["input"], "WAV file")->required();
  roundtrip->add_option("--report", positional["report"], "JSON report path");

  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "sbrestore");
  std::vector<char*> argv;
  for (std::string& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!from_manifest.empty()) {
      if (!app.get_subcommands().empty()) {
        throw UsageError("--from-manifest takes no subcommand");
      }
      return Rerun(from_manifest, out, err);
    }
    if (app.get_subcommands().empty()) {
      err << app.help();
      return kExitUsage;
    }
    Job job;
    job.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) job.config = LoadRunConfig(config_path);
    RunConfig& c = job.config;
    try {
      if (task) c.task = ParseTask(*task);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    Apply(seed, c.seed);
    if (steps) {
      if (job.command == "train-toy") {
        c.train.steps = *steps;
      } else {
        c.sampler.num_steps = *steps;
      }
    }
    Apply(cutoff_hz, c.cutoff_hz);
    Apply(gap_ms, c.gap_ms);
    Apply(period_s, c.period_s);
    Apply(window, c.window_frames);
    Apply(hop, c.window_hop);
    Apply(sample_rate, c.sample_rate);
    Apply(fft_size, c.stft.fft_size);
    Apply(win_length, c.stft.win_length);
    Apply(stft_hop, c.stft.hop);
    Apply(rho, c.rho);
    Apply(beta_max, c.beta_max);
    Apply(sigma_fill, c.sigma_fill);
    Apply(threads, c.sampler.num_threads);
    if (deterministic) c.sampler.deterministic = true;
    if (no_clamp) c.sampler.clamp_known_region = false;
    if (!checkpoints.empty()) c.checkpoints = checkpoints;
    Apply(oracle_ref, c.oracle_ref);
    if (pcm16) c.pcm16 = true;
    Apply(partitions, c.train.partitions);
    Apply(pretrain_steps, c.train.pretrain_steps);
    Apply(segments, c.train.segments);
    Apply(corpus_dir, c.train.corpus_dir);
    Apply(lr, c.train.learning_rate);
    Apply(batch_size, c.train.batch_size);
    Apply(channels, c.train.channels);
    Apply(blocks, c.train.blocks);
    Apply(train_window, c.train.window_frames);
    if (freq_loss_mask) c.train.frequency_loss_mask = true;
    if (!cutoffs.empty()) c.eval.cutoffs_hz = cutoffs;
    if (!gaps.empty()) c.eval.gaps_ms = gaps;
    for (const auto& [name, value] : positional) {
      if (!value.empty()) job.arguments[name] = value;
    }
    return RunJob(job, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int RunMain(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return RunMain(args, std::cout, std::cerr);
}

}  // namespace sbrestore::cli
