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

#include "sbrestore/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sbrestore {
namespace {

double ClampDb(double db) {
  if (std::isnan(db)) return -kSiSpecCapDb;
  return std::clamp(db, -kSiSpecCapDb, kSiSpecCapDb);
}

std::pair<Plane, Plane> AlignedMagnitudes(const Waveform& ref,
                                          const Waveform& restored,
                                          const StftParams& params) {
  if (ref.sample_rate != restored.sample_rate) {
    throw std::invalid_argument("sample rates differ");
  }
  if (std::abs(ref.size() - restored.size()) > params.hop) {
    throw std::invalid_argument("reference and restored lengths differ by "
                                "more than one hop");
  }
  const size_t len = std::min(ref.samples.size(), restored.samples.size());
  const std::span<const double> a(ref.samples.data(), len);
  const std::span<const double> b(restored.samples.data(), len);
  return {Stft(a, params).Magnitude(), Stft(b, params).Magnitude()};
}

Plane GatherFrames(const Plane& mag, const std::vector<FrameGap>& gaps) {
  int total = 0;
  for (const FrameGap& g : gaps) total += g.length();
  Plane out(mag.rows(), total);
  int col = 0;
  for (const FrameGap& g : gaps) {
    out.middleCols(col, g.length()) = mag.middleCols(g.first, g.length());
    col += g.length();
  }
  return out;
}

}  // namespace

double Lsd(const PlaneRef& mag_ref, const PlaneRef& mag_est, double floor) {
  if (mag_ref.rows() != mag_est.rows() || mag_ref.cols() != mag_est.cols()) {
    throw std::invalid_argument("LSD inputs differ in shape");
  }
  if (mag_ref.size() == 0) throw std::invalid_argument("empty LSD input");
  double total = 0.0;
  for (Eigen::Index j = 0; j < mag_ref.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < mag_ref.rows(); ++i) {
      const double r = std::max(mag_ref(i, j), floor);
      const double e = std::max(mag_est(i, j), floor);
      const double term = std::log10((r * r) / (e * e));
      acc += term * term;
    }
    total += std::sqrt(acc / mag_ref.rows());
  }
  return total / mag_ref.cols();
}

double SiSpec(const PlaneRef& mag_ref, const PlaneRef& mag_est,
              SiSpecForm form) {
  if (mag_ref.rows() != mag_est.rows() || mag_ref.cols() != mag_est.cols()) {
    throw std::invalid_argument("SiSpec inputs differ in shape");
  }
  const double ref_sq = mag_ref.square().sum();
  if (!(ref_sq > 0.0)) throw std::invalid_argument("SiSpec reference is zero");
  const double dot = (mag_ref * mag_est).sum();
  const double est_sq = mag_est.square().sum();
  double alpha = 0.0;
  if (form == SiSpecForm::kConventional) {
    alpha = dot / ref_sq;
  } else {
    if (!(est_sq > 0.0)) return -kSiSpecCapDb;
    alpha = dot / est_sq;
  }
  const double target_sq = alpha * alpha * ref_sq;
  const double noise_sq = (mag_est - alpha * mag_ref).square().sum();
  if (!(target_sq > 0.0)) return -kSiSpecCapDb;
  if (!(noise_sq > 0.0)) return kSiSpecCapDb;
  return ClampDb(10.0 * std::log10(target_sq / noise_sq));
}

EvalEntry EvalSection::Mean() const {
  EvalEntry m;
  m.file = "mean";
  if (entries.empty()) return m;
  for (const EvalEntry& e : entries) {
    m.lsd += e.lsd;
    m.sispec += e.sispec;
    m.region_lsd += e.region_lsd;
    m.region_sispec += e.region_sispec;
  }
  const double n = static_cast<double>(entries.size());
  m.lsd /= n;
  m.sispec /= n;
  m.region_lsd /= n;
  m.region_sispec /= n;
  return m;
}

std::vector<FrameGap> InpaintGapGrid(int num_samples, int sample_rate,
                                     double gap_ms, double period_s,
                                     const StftParams& params) {
  if (!(gap_ms > 0.0) || !(period_s > 0.0)) {
    throw std::invalid_argument("gap length and period must be positive");
  }
  const double duration = static_cast<double>(num_samples) / sample_rate;
  const double gap_s = gap_ms / 1000.0;
  const int frames = GapFrames(gap_s, params, sample_rate);
  const int num_frames = NumFrames(num_samples, params);
  std::vector<FrameGap> gaps;
  for (int k = 0;; ++k) {
    const double center = (k + 0.5) * period_s;
    if (center + 0.5 * gap_s > duration + 1e-9) break;
    const int center_frame =
        static_cast<int>(std::floor(center * sample_rate / params.hop + 0.5));
    const int first = std::max(0, center_frame - frames / 2);
    const int last = std::min(num_frames - 1, first + frames - 1);
    gaps.push_back({first, last});
  }
  return gaps;
}

EvalEntry EvalProtocolBwe(const Waveform& ref, const Waveform& restored,
                          double cutoff_hz, const StftParams& params) {
  const auto [mag_ref, mag_est] = AlignedMagnitudes(ref, restored, params);
  EvalEntry e;
  e.lsd = Lsd(mag_ref, mag_est);
  e.sispec = SiSpec(mag_ref, mag_est);
  const int cutoff = CutoffSubband(cutoff_hz, params, ref.sample_rate);
  const int rows = static_cast<int>(mag_ref.rows()) - cutoff - 1;
  if (rows > 0) {
    e.region_lsd = Lsd(mag_ref.bottomRows(rows), mag_est.bottomRows(rows));
    const double ref_energy = mag_ref.bottomRows(rows).square().sum();
    e.region_sispec =
        ref_energy > 0.0
            ? SiSpec(mag_ref.bottomRows(rows), mag_est.bottomRows(rows))
            : 0.0;
  }
  return e;
}

EvalEntry EvalProtocolInpaint(const Waveform& ref, const Waveform& restored,
                              double gap_ms, double period_s,
                              const StftParams& params) {
  const auto [mag_ref, mag_est] = AlignedMagnitudes(ref, restored, params);
  EvalEntry e;
  e.lsd = Lsd(mag_ref, mag_est);
  e.sispec = SiSpec(mag_ref, mag_est);
  const int len = std::min(ref.size(), restored.size());
  const std::vector<FrameGap> gaps =
      InpaintGapGrid(len, ref.sample_rate, gap_ms, period_s, params);
  if (!gaps.empty()) {
    const Plane r = GatherFrames(mag_ref, gaps);
    const Plane s = GatherFrames(mag_est, gaps);
    e.region_lsd = Lsd(r, s);
    e.region_sispec = r.square().sum() > 0.0 ? SiSpec(r, s) : 0.0;
  }
  return e;
}

std::string FormatReportText(const EvalReport& report) {
  std::ostringstream os;
  char line[256];
  os << "# sbrestore evaluation report (schema " << report.schema_version
     << ", magnitude floor " << report.magnitude_floor << ")\n";
  for (const EvalSection& s : report.sections) {
    os << "\n## " << s.label << " (" << TaskName(s.task);
    if (s.task == Task::kBandwidthExtension) os << ", cutoff " << s.cutoff_hz << " Hz";
    if (s.task == Task::kInpainting) {
      os << ", gap " << s.gap_ms << " ms every " << s.period_s << " s";
    }
    os << ")\n";
    std::snprintf(line, sizeof(line), "%-32s %10s %12s %12s %14s\n", "file",
                  "LSD", "SiSpec(dB)", "region LSD", "region SiSpec");
    os << line;
    auto row = [&](const EvalEntry& e) {
      std::snprintf(line, sizeof(line), "%-32s %10.4f %12.4f %12.4f %14.4f\n",
                    e.file.c_str(), e.lsd, e.sispec, e.region_lsd,
                    e.region_sispec);
      os << line;
    };
    for (const EvalEntry& e : s.entries) row(e);
    row(s.Mean());
    for (const std::string& f : s.skipped) os << "skipped: " << f << "\n";
  }
  return os.str();
}

std::string FormatReportJson(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = report.schema_version;
  j["magnitude_floor"] = report.magnitude_floor;
  j["sections"] = nlohmann::ordered_json::array();
  auto entry_json = [](const EvalEntry& e) {
    return nlohmann::ordered_json{{"file", e.file},
                                  {"lsd", e.lsd},
                                  {"sispec_db", e.sispec},
                                  {"region_lsd", e.region_lsd},
                                  {"region_sispec_db", e.region_sispec}};
  };
  for (const EvalSection& s : report.sections) {
    nlohmann::ordered_json sj;
    sj["label"] = s.label;
    sj["task"] = TaskName(s.task);
    sj["cutoff_hz"] = s.cutoff_hz;
    sj["gap_ms"] = s.gap_ms;
    sj["period_s"] = s.period_s;
    sj["entries"] = nlohmann::ordered_json::array();
    for (const EvalEntry& e : s.entries) sj["entries"].push_back(entry_json(e));
    sj["mean"] = entry_json(s.Mean());
    sj["skipped"] = s.skipped;
    j["sections"].push_back(sj);
  }
  return j.dump(2) + "\n";
}

}  // namespace sbrestore
