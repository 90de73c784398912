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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli/commands.h"
#include "cli/errors.h"
#include "cli/manifest.h"
#include "cli/sidecar.h"
#include "json.hpp"
#include "sbrestore/stft.h"
#include "sbrestore/wav_io.h"
#include "test_util.h"

namespace sbrestore::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sbrestore_cli_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  int Run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = RunMain(args, out, err);
    last_out_ = out.str();
    last_err_ = err.str();
    return code;
  }

  fs::path dir_;
  std::string last_out_, last_err_;
};

// Toy-scale STFT flags shared by most commands.
std::vector<std::string> ToyFlags() {
  return {"--sample-rate", "8000", "--fft-size", "256", "--win-length", "256",
          "--stft-hop", "64"};
}

std::vector<std::string> Cat(std::vector<std::string> a,
                             const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Waveform Tonal(int seconds, int sr) {
  Waveform w;
  w.sample_rate = sr;
  w.samples.assign(seconds * sr, 0.0);
  // Partials stay well below 4 kHz: Hann side lobes of a tone 70 bins under
  // the cutoff alone reach ~1e-6 of the low band on re-analysis.
  for (double hz : {220.0, 440.0, 660.0, 1000.0}) {
    const auto s = testing::Sine(seconds * sr, hz, sr, 0.15);
    for (size_t k = 0; k < s.size(); ++k) w.samples[k] += s[k];
  }
  return w;
}

Waveform Mixed(int samples, int sr, uint64_t seed) {
  Waveform w{testing::Sine(samples, 330, sr, 0.3), sr};
  const auto n = testing::Noise(samples, seed, 0.05);
  for (int k = 0; k < samples; ++k) w.samples[k] += n[k];
  return w;
}

double HighToLowRatio(const Waveform& w, double cutoff_hz) {
  const StftParams p;
  const ComplexSpec s = Stft(w.samples, p);
  const int cut = CutoffSubband(cutoff_hz, p, w.sample_rate);
  const double above = SubbandFrequency(cut + 1, p, w.sample_rate);
  const std::vector<std::pair<double, double>> bands = {
      {0.0, cutoff_hz}, {above, 0.5 * w.sample_rate}};
  const auto avg = BandAverageMagnitude(s, p, w.sample_rate, bands);
  return avg[1] / avg[0];
}

TEST_F(CliTest, DegradeBandwidthExtensionRemovesHighBand) {
  WriteWav(P("tonal.wav"), Tonal(10, 44100));
  ASSERT_EQ(Run({"degrade", P("tonal.wav"), P("tonal_bwe.wav"), "--task",
                 "bwe", "--cutoff-hz", "4000"}),
            0)
      << last_err_;
  EXPECT_LT(HighToLowRatio(ReadWav(P("tonal_bwe.wav")), 4000), 1e-6);
  const MaskSidecar side = ReadSidecar(SidecarPathFor(P("tonal_bwe.wav")));
  EXPECT_EQ(side.cutoff_subband, 186);
  EXPECT_TRUE(fs::exists(ManifestPathFor(P("tonal_bwe.wav"))));

  // Broadband input: window leakage across the cutoff sets a floor.
  WriteWav(P("noise.wav"), Waveform{testing::Noise(441000, 5, 0.2), 44100});
  ASSERT_EQ(Run({"degrade", P("noise.wav"), P("noise_bwe.wav"), "--task",
                 "bwe", "--cutoff-hz", "4000"}),
            0);
  const double broadband = HighToLowRatio(ReadWav(P("noise_bwe.wav")), 4000);
  EXPECT_LT(broadband, 1e-3);
  EXPECT_GT(HighToLowRatio(ReadWav(P("noise.wav")), 4000), 0.5);
}

TEST_F(CliTest, DegradeInpaintListsGaps) {
  WriteWav(P("a.wav"), Mixed(12 * 44100, 44100, 1));
  ASSERT_EQ(Run({"degrade", P("a.wav"), P("b.wav"), "--task", "inpaint",
                 "--gap-ms", "1000", "--period-s", "5"}),
            0)
      << last_err_;
  const MaskSidecar side = ReadSidecar(SidecarPathFor(P("b.wav")));
  ASSERT_EQ(side.gaps.size(), 2u);
  EXPECT_EQ(side.gaps[0].length(), 86);
  const Waveform out = ReadWav(P("b.wav"));
  // Samples well inside the first gap (2.5 s) are silent.
  for (int k = 2 * 44100 + 30000; k < 2 * 44100 + 30100; ++k) {
    ASSERT_LT(std::abs(out.samples[k]), 1e-6);
  }
  // A gap that does not fit is a data error.
  WriteWav(P("short.wav"), Mixed(44100, 44100, 2));
  EXPECT_EQ(Run({"degrade", P("short.wav"), P("c.wav"), "--task", "inpaint",
                 "--gap-ms", "1000", "--period-s", "5"}),
            kExitData);
}

TEST_F(CliTest, DegradeIdentityKeepsBytes) {
  WriteWav(P("a.wav"), Mixed(20000, 44100, 3), WavSampleFormat::kPcm16);
  ASSERT_EQ(Run({"degrade", P("a.wav"), P("b.wav"), "--task", "none"}), 0);
  EXPECT_EQ(Sha256File(P("a.wav")), Sha256File(P("b.wav")));
}

TEST_F(CliTest, DegradeRejectsMultichannelAndMissingFiles) {
  // Minimal stereo header.
  std::vector<uint8_t> b = {'R', 'I', 'F', 'F', 36, 0, 0, 0, 'W', 'A', 'V', 'E',
                            'f', 'm', 't', ' ', 16, 0, 0, 0, 1, 0, 2, 0,
                            0x44, 0xAC, 0, 0, 0x10, 0xB1, 2, 0, 4, 0, 16, 0,
                            'd', 'a', 't', 'a', 0, 0, 0, 0};
  WriteFileBytes(P("stereo.wav"), b);
  EXPECT_EQ(Run({"degrade", P("stereo.wav"), P("o.wav"), "--task", "bwe"}),
            kExitData);
  EXPECT_NE(last_err_.find("channel"), std::string::npos) << last_err_;
  EXPECT_EQ(Run({"degrade", P("nope.wav"), P("o.wav")}), kExitData);
}

TEST_F(CliTest, OracleRestoreReproducesReference) {
  WriteWav(P("clean.wav"), Mixed(6 * 44100, 44100, 4));
  for (const std::string task : {"bwe", "inpaint"}) {
    const std::string deg = P(task + "_deg.wav"), res = P(task + "_res.wav");
    ASSERT_EQ(Run({"degrade", P("clean.wav"), deg, "--task", task, "--gap-ms",
                   "500", "--period-s", "3"}),
              0)
        << last_err_;
    ASSERT_EQ(Run({"restore", deg, res, "--oracle-ref", P("clean.wav"),
                   "--deterministic", "--steps", "4", "--window", "256",
                   "--hop", "128"}),
              0)
        << last_err_;
    const Waveform ref = ReadWav(P("clean.wav"));
    const Waveform out = ReadWav(res);
    ASSERT_EQ(out.size(), ref.size());
    EXPECT_LT(testing::MaxAbsDiff(out.samples, ref.samples), 1e-4) << task;

    const Manifest m = ReadManifest(ManifestPathFor(res));
    const auto& plan = m.details["window_plan"];
    // 517 frames, window 256, hop 128: offsets 0, 128, 256, 384.
    EXPECT_EQ(plan["window_count"].get<int>(), 4);
    EXPECT_EQ(plan["padding"].get<int>(), 123);
    EXPECT_TRUE(m.details.contains("phase_ortho"));
    EXPECT_EQ(m.outputs.at("restored").sha256, Sha256File(res));
  }
}

TEST_F(CliTest, RestoreChecksInputs) {
  WriteWav(P("clean.wav"), Mixed(44100, 44100, 5));
  ASSERT_EQ(Run({"degrade", P("clean.wav"), P("d.wav"), "--task", "bwe"}), 0);
  // No checkpoint and no oracle.
  EXPECT_EQ(Run({"restore", P("d.wav"), P("r.wav")}), kExitUsage);
  // Sidecar from another file.
  WriteWav(P("other.wav"), Mixed(30000, 44100, 6));
  EXPECT_EQ(Run({"restore", P("other.wav"), P("r.wav"), "--mask",
                 SidecarPathFor(P("d.wav")).string(), "--oracle-ref",
                 P("clean.wav")}),
            kExitData);
  EXPECT_EQ(Run({"restore", P("d.wav"), P("r.wav"), "--checkpoint",
                 P("missing.ckpt")}),
            kExitData);
}

TEST_F(CliTest, TrainRestoreEvalPipelineIsDeterministic) {
  const std::vector<std::string> train = Cat(
      {"train-toy", P("model.ckpt"), "--steps", "3", "--segments", "4",
       "--channels", "4", "--blocks", "1", "--train-window", "16",
       "--partitions", "2", "--seed", "11"},
      ToyFlags());
  ASSERT_EQ(Run(train), 0) << last_err_;
  const auto paths = PartitionCheckpointPaths(P("model.ckpt"), 2);
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(paths[0], P("model_p0.ckpt"));
  for (const auto& p : paths) ASSERT_TRUE(fs::exists(p)) << p;
  EXPECT_TRUE(fs::exists(P("model.ckpt.loss.tsv")));
  const std::string first_loss = Sha256File(P("model.ckpt.loss.tsv"));
  const std::string first_ckpt = Sha256File(paths[1]);
  ASSERT_EQ(Run(train), 0);
  EXPECT_EQ(Sha256File(P("model.ckpt.loss.tsv")), first_loss);
  EXPECT_EQ(Sha256File(paths[1]), first_ckpt);

  fs::create_directories(P("ref"));
  fs::create_directories(P("deg"));
  WriteWav(P("ref/song.wav"), Mixed(3 * 8000, 8000, 7));
  fs::create_directories(P("out"));
  ASSERT_EQ(Run(Cat({"degrade", P("ref/song.wav"), P("deg/song.wav"), "--task",
                     "bwe", "--cutoff-hz", "2000"},
                    ToyFlags())),
            0)
      << last_err_;
  const std::vector<std::string> restore = {
      "restore", P("deg/song.wav"), P("out/song.wav"), "--checkpoint",
      paths[0], "--checkpoint", paths[1], "--steps", "5", "--seed", "3",
      "--threads", "2"};
  ASSERT_EQ(Run(restore), 0) << last_err_;
  const std::string first_out = Sha256File(P("out/song.wav"));
  const Manifest m = ReadManifest(ManifestPathFor(P("out/song.wav")));
  // 376 frames in windows of 16 with hop 8.
  EXPECT_EQ(m.details["window_plan"]["window"].get<int>(), 16);
  EXPECT_EQ(m.details["window_plan"]["window_count"].get<int>(), 46);
  ASSERT_EQ(Run(restore), 0);
  EXPECT_EQ(Sha256File(P("out/song.wav")), first_out);

  // The restored file is unchanged below the cutoff.
  ASSERT_EQ(Run(Cat({"eval", P("ref"), P("out"), P("report"), "--task", "bwe",
                     "--cutoffs", "2000"},
                    ToyFlags())),
            0)
      << last_err_;
  const auto j = nlohmann::json::parse(std::ifstream(P("report.json")));
  ASSERT_EQ(j["sections"].size(), 1u);
  EXPECT_GT(j["sections"][0]["mean"]["region_lsd"].get<double>(), 0.0);

  // Re-running from the manifest reproduces the output digest.
  ASSERT_EQ(Run({"--from-manifest",
                 ManifestPathFor(P("out/song.wav")).string()}),
            0)
      << last_err_;
  EXPECT_NE(last_out_.find("reproduced"), std::string::npos);
}

TEST_F(CliTest, TrainMismatchedCheckpointIsRejected) {
  ASSERT_EQ(Run(Cat({"train-toy", P("m.ckpt"), "--steps", "1", "--segments",
                     "2", "--channels", "2", "--blocks", "1", "--train-window",
                     "8"},
                    ToyFlags())),
            0)
      << last_err_;
  WriteWav(P("a.wav"), Mixed(44100, 44100, 8));
  ASSERT_EQ(Run({"degrade", P("a.wav"), P("d.wav"), "--task", "bwe"}), 0);
  // 44.1 kHz default STFT against an 8 kHz checkpoint.
  EXPECT_EQ(Run({"restore", P("d.wav"), P("r.wav"), "--checkpoint", P("m.ckpt")}),
            kExitData);
}

TEST_F(CliTest, EvalIdenticalCopiesAndSections) {
  fs::create_directories(P("ref"));
  fs::create_directories(P("res"));
  for (int k = 0; k < 2; ++k) {
    const Waveform w = Mixed(3 * 44100, 44100, 20 + k);
    WriteWav(P("ref/s" + std::to_string(k) + ".wav"), w);
    WriteWav(P("res/s" + std::to_string(k) + ".wav"), w);
  }
  ASSERT_EQ(Run({"eval", P("ref"), P("res"), P("rep"), "--task", "bwe",
                 "--cutoffs", "4000,8000,12000"}),
            0)
      << last_err_;
  const auto j = nlohmann::json::parse(std::ifstream(P("rep.json")));
  ASSERT_EQ(j["sections"].size(), 3u);
  for (const auto& s : j["sections"]) {
    EXPECT_EQ(s["mean"]["lsd"].get<double>(), 0.0);
    EXPECT_EQ(s["entries"].size(), 2u);
  }
  EXPECT_EQ(j["sections"][2]["label"], "bwe_12000hz");
  std::ifstream txt(P("rep.txt"));
  std::stringstream ss;
  ss << txt.rdbuf();
  EXPECT_NE(ss.str().find("## bwe_8000hz"), std::string::npos);

  ASSERT_EQ(Run({"eval", P("ref"), P("res"), P("rep2"), "--task", "inpaint",
                 "--gaps", "300", "--period-s", "1"}),
            0);

  // A stem without a partner is listed and the exit code is nonzero.
  WriteWav(P("res/extra.wav"), Mixed(44100, 44100, 30));
  EXPECT_EQ(Run({"eval", P("ref"), P("res"), P("rep3"), "--task", "bwe",
                 "--cutoffs", "4000"}),
            kExitData);
  const auto j3 = nlohmann::json::parse(std::ifstream(P("rep3.json")));
  ASSERT_EQ(j3["sections"][0]["skipped"].size(), 1u);
  EXPECT_EQ(j3["sections"][0]["entries"].size(), 2u);
}

TEST_F(CliTest, RoundtripCheck) {
  WriteWav(P("a.wav"), Mixed(2 * 44100, 44100, 9));
  EXPECT_EQ(Run({"roundtrip-check", P("a.wav"), "--report", P("a.json")}), 0)
      << last_err_;
  const auto j = nlohmann::json::parse(std::ifstream(P("a.json")));
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_LT(j["factorization_max_error"].get<double>(), 1e-6);
  EXPECT_LT(j["phase_ortho"]["median"].get<double>(), 1e-10);

  WriteWav(P("silent.wav"), Waveform{std::vector<double>(44100, 0.0), 44100});
  EXPECT_EQ(Run({"roundtrip-check", P("silent.wav")}), 0) << last_err_;

  std::vector<uint8_t> bytes = ReadFileBytes(P("a.wav"));
  bytes[0] = 'X';
  WriteFileBytes(P("bad.wav"), bytes);
  EXPECT_EQ(Run({"roundtrip-check", P("bad.wav")}), kExitData);
  EXPECT_NE(last_err_.find("FAIL parse"), std::string::npos) << last_err_;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Run({}), kExitUsage);
  EXPECT_EQ(Run({"frobnicate"}), kExitUsage);
  EXPECT_EQ(Run({"degrade", P("a.wav")}), kExitUsage);
  EXPECT_EQ(Run({"degrade", "a", "b", "--task", "declip"}), kExitUsage);
  EXPECT_EQ(Run({"--help"}), 0);
  std::ofstream(P("cfg.json")) << R"({"sample_rate": 8000, "bogus": 1})";
  EXPECT_EQ(Run({"degrade", "a", "b", "--config", P("cfg.json")}), kExitUsage);
  EXPECT_EQ(Run({"restore", "a", "b", "--fft-size", "100", "--win-length",
                 "300"}),
            kExitUsage);
}

TEST_F(CliTest, ConfigFileIsApplied) {
  std::ofstream(P("cfg.json")) << R"({
    // toy settings
    "task": "bwe", "degrade": {"cutoff_hz": 2000}, "sample_rate": 8000,
    "stft": {"fft_size": 256, "win_length": 256, "hop": 64}
  })";
  WriteWav(P("a.wav"), Mixed(16000, 16000, 10));
  ASSERT_EQ(Run({"degrade", P("a.wav"), P("b.wav"), "--config", P("cfg.json")}),
            0)
      << last_err_;
  const MaskSidecar side = ReadSidecar(SidecarPathFor(P("b.wav")));
  EXPECT_EQ(side.sample_rate, 8000);
  EXPECT_EQ(side.stft.fft_size, 256);
  EXPECT_EQ(side.cutoff_subband, 64);
  EXPECT_EQ(ReadWav(P("b.wav")).size(), 8000);
}

TEST_F(CliTest, RerunDetectsChangedInputs) {
  WriteWav(P("a.wav"), Mixed(44100, 44100, 11));
  ASSERT_EQ(Run({"degrade", P("a.wav"), P("b.wav"), "--task", "bwe"}), 0);
  ASSERT_EQ(Run({"--from-manifest", ManifestPathFor(P("b.wav")).string()}), 0)
      << last_err_;
  WriteWav(P("a.wav"), Mixed(44100, 44100, 12));
  EXPECT_EQ(Run({"--from-manifest", ManifestPathFor(P("b.wav")).string()}),
            kExitData);
}

}  // namespace
}  // namespace sbrestore::cli
