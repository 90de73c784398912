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

#ifndef SBRESTORE_CORPUS_H_
#define SBRESTORE_CORPUS_H_

#include <cstdint>
#include <vector>

#include "sbrestore/factorized.h"
#include "sbrestore/rng.h"
#include "sbrestore/stft.h"

namespace sbrestore {

// Seeded harmonic test material: a few notes, each 1-8 harmonics of a random
// fundamental with random spectral tilt, onset and decay, over a white noise
// floor and optionally a burst of low-passed noise.
struct SynthConfig {
  int sample_rate = 8000;
  int num_samples = 8000;
  double min_f0_hz = 100.0;
  double max_f0_hz = 2000.0;
  int min_harmonics = 1;
  int max_harmonics = 8;
  int max_notes = 3;
  double noise_floor = 1e-3;
  double filtered_noise_probability = 0.3;
};

Waveform SynthesizeSegment(const SynthConfig& cfg, Rng& rng);

// Item k is generated from its own stream forked off `seed`, so corpora built
// with the same seed share their prefix.
std::vector<Waveform> SynthesizeCorpus(const SynthConfig& cfg, int count,
                                       uint64_t seed);

// STFT + factorization of every segment.
std::vector<FactorizedSpec> FactorizeCorpus(const std::vector<Waveform>& waves,
                                            const StftParams& params,
                                            double rho);

}  // namespace sbrestore

#endif  // SBRESTORE_CORPUS_H_
