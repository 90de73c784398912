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

#ifndef SBRESTORE_FACTORIZED_H_
#define SBRESTORE_FACTORIZED_H_

#include <array>
#include <cstdint>

#include "sbrestore/stft.h"

namespace sbrestore {

inline constexpr double kDefaultRho = 0.25;

// Three-channel magnitude/phase representation of a complex spectrogram:
// channel 0 holds compressed magnitudes |S|^rho, channels 1 and 2 hold the
// cosine and sine of the phase. This is the sample space of the bridge.
struct FactorizedSpec {
  std::array<Plane, 3> ch;
  double rho = kDefaultRho;

  static FactorizedSpec Zero(int num_subbands, int num_frames,
                             double rho = kDefaultRho);

  int num_subbands() const { return static_cast<int>(ch[0].rows()); }
  int num_frames() const { return static_cast<int>(ch[0].cols()); }

  Plane& mag() { return ch[0]; }
  const Plane& mag() const { return ch[0]; }
  Plane& cos() { return ch[1]; }
  const Plane& cos() const { return ch[1]; }
  Plane& sin() { return ch[2]; }
  const Plane& sin() const { return ch[2]; }

  bool SameShape(const FactorizedSpec& other) const;

  // Frames [first, first + count), all channels.
  FactorizedSpec Frames(int first, int count) const;

  // Elementwise arithmetic over all three channels; rho is taken from *this.
  FactorizedSpec& operator+=(const FactorizedSpec& other);
  FactorizedSpec& operator-=(const FactorizedSpec& other);
  FactorizedSpec& operator*=(double scale);
};

FactorizedSpec operator+(FactorizedSpec a, const FactorizedSpec& b);
FactorizedSpec operator-(FactorizedSpec a, const FactorizedSpec& b);
FactorizedSpec operator*(FactorizedSpec a, double scale);

// Requires rho in (0, 1]. Zero-magnitude cells get phase (cos, sin) = (1, 0).
FactorizedSpec Factorize(const ComplexSpec& spec, double rho = kDefaultRho);

struct UnitPhase {
  double cos = 1.0;
  double sin = 0.0;
  // True when the input norm fell below the floor and (1, 0) was substituted.
  bool degenerate = false;
};

inline constexpr double kPhaseNormFloor = 1e-12;

// Nearest rotation in Frobenius norm to the 2x2 matrix [[c, -s], [s, c]],
// returned as its first column. For this matrix family the SVD solution
// reduces to normalizing (c, s).
UnitPhase SvdoPlus(double c, double s);

// Squared Frobenius residual of SvdoPlus: 2 * (sqrt(c^2 + s^2) - 1)^2.
double PhaseOrthoError(double c, double s);

struct PhaseOrthoStats {
  int64_t cells = 0;
  int64_t degenerate_cells = 0;
};

// Inverts Factorize. Negative compressed magnitudes are clamped to zero
// before the 1/rho power. With `orthogonalize` set the phase channels pass
// through SvdoPlus; otherwise they are used as-is.
ComplexSpec Reconstruct(const FactorizedSpec& x, bool orthogonalize,
                        PhaseOrthoStats* stats = nullptr);

// Per-cell PhaseOrthoError of channels 1 and 2.
Plane PhaseOrthoErrorMap(const FactorizedSpec& x);

}  // namespace sbrestore

#endif  // SBRESTORE_FACTORIZED_H_
