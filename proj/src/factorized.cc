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

#include "sbrestore/factorized.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbrestore {

FactorizedSpec FactorizedSpec::Zero(int num_subbands, int num_frames,
                                    double rho) {
  FactorizedSpec x;
  for (Plane& p : x.ch) p = Plane::Zero(num_subbands, num_frames);
  x.rho = rho;
  return x;
}

bool FactorizedSpec::SameShape(const FactorizedSpec& other) const {
  return num_subbands() == other.num_subbands() &&
         num_frames() == other.num_frames();
}

FactorizedSpec FactorizedSpec::Frames(int first, int count) const {
  if (first < 0 || count < 0 || first + count > num_frames()) {
    throw std::out_of_range("frame range outside spectrogram");
  }
  FactorizedSpec out;
  out.rho = rho;
  for (int k = 0; k < 3; ++k) out.ch[k] = ch[k].middleCols(first, count);
  return out;
}

FactorizedSpec& FactorizedSpec::operator+=(const FactorizedSpec& other) {
  if (!SameShape(other)) throw std::invalid_argument("shape mismatch");
  for (int k = 0; k < 3; ++k) ch[k] += other.ch[k];
  return *this;
}

FactorizedSpec& FactorizedSpec::operator-=(const FactorizedSpec& other) {
  if (!SameShape(other)) throw std::invalid_argument("shape mismatch");
  for (int k = 0; k < 3; ++k) ch[k] -= other.ch[k];
  return *this;
}

FactorizedSpec& FactorizedSpec::operator*=(double scale) {
  for (Plane& p : ch) p *= scale;
  return *this;
}

FactorizedSpec operator+(FactorizedSpec a, const FactorizedSpec& b) {
  return a += b;
}

FactorizedSpec operator-(FactorizedSpec a, const FactorizedSpec& b) {
  return a -= b;
}

FactorizedSpec operator*(FactorizedSpec a, double scale) { return a *= scale; }

FactorizedSpec Factorize(const ComplexSpec& spec, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("rho must lie in (0, 1]");
  }
  if (spec.re.rows() != spec.im.rows() || spec.re.cols() != spec.im.cols()) {
    throw std::invalid_argument("real/imaginary shape mismatch");
  }
  const int n = spec.num_subbands(), w = spec.num_frames();
  FactorizedSpec x = FactorizedSpec::Zero(n, w, rho);
  for (int j = 0; j < w; ++j) {
    for (int i = 0; i < n; ++i) {
      const double re = spec.re(i, j), im = spec.im(i, j);
      const double mag = std::hypot(re, im);
      x.mag()(i, j) = std::pow(mag, rho);
      if (mag > 0.0) {
        x.cos()(i, j) = re / mag;
        x.sin()(i, j) = im / mag;
      } else {
        x.cos()(i, j) = 1.0;
        x.sin()(i, j) = 0.0;
      }
    }
  }
  return x;
}

UnitPhase SvdoPlus(double c, double s) {
  const double norm = std::hypot(c, s);
  if (!(norm >= kPhaseNormFloor)) return {1.0, 0.0, true};
  return {c / norm, s / norm, false};
}

double PhaseOrthoError(double c, double s) {
  const double d = std::hypot(c, s) - 1.0;
  return 2.0 * d * d;
}

ComplexSpec Reconstruct(const FactorizedSpec& x, bool orthogonalize,
                        PhaseOrthoStats* stats) {
  const int n = x.num_subbands(), w = x.num_frames();
  const double inv_rho = 1.0 / x.rho;
  ComplexSpec spec{Plane(n, w), Plane(n, w)};
  int64_t degenerate = 0;
  for (int j = 0; j < w; ++j) {
    for (int i = 0; i < n; ++i) {
      const double mag = std::pow(std::max(x.mag()(i, j), 0.0), inv_rho);
      double c = x.cos()(i, j), s = x.sin()(i, j);
      if (orthogonalize) {
        const UnitPhase u = SvdoPlus(c, s);
        degenerate += u.degenerate ? 1 : 0;
        c = u.cos;
        s = u.sin;
      }
      spec.re(i, j) = mag * c;
      spec.im(i, j) = mag * s;
    }
  }
  if (stats != nullptr) {
    stats->cells += static_cast<int64_t>(n) * w;
    stats->degenerate_cells += degenerate;
  }
  return spec;
}

Plane PhaseOrthoErrorMap(const FactorizedSpec& x) {
  const Plane norm = (x.cos().square() + x.sin().square()).sqrt();
  return 2.0 * (norm - 1.0).square();
}

}  // namespace sbrestore
