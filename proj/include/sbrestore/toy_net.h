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

#ifndef SBRESTORE_TOY_NET_H_
#define SBRESTORE_TOY_NET_H_

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sbrestore/denoiser.h"
#include "sbrestore/factorized.h"
#include "sbrestore/rng.h"

namespace sbrestore {

inline constexpr int kTimeEmbeddingDim = 128;

// Flat parameter or gradient storage. Eigen-aligned so vectorized reductions
// over mapped tensors peel the same prefix on every allocation; with plain
// std::vector the summation order, and thus the last bits, followed the heap
// address.
using ParamVector = std::vector<double, Eigen::aligned_allocator<double>>;

struct ToyNetConfig {
  int channels = 24;
  // Residual blocks; block b's second convolution is dilated along the
  // frequency axis by freq_dilations[b % size].
  int blocks = 4;
  std::vector<int> freq_dilations = {1, 2, 4, 8};
  int embed_hidden = 64;
  // Width of the training segments; the denoiser refuses wider inputs.
  int window_frames = 64;

  bool operator==(const ToyNetConfig&) const = default;
};

// Sinusoidal embedding of t in [0, 1] (scaled by 1000), kTimeEmbeddingDim
// entries: sines then cosines over geometrically spaced frequencies.
Eigen::VectorXd TimeEmbedding(double t);

// Small residual convolutional network over the 3 input channels plus a
// frequency-conditioning channel holding i / (N - 1). All convolutions are
// 3x3 with zero padding, so the net is translation-equivariant in time away
// from the edges. Parameters live in one flat vector.
//
//   h = conv_in([x, freq])
//   repeat: h += conv2(silu(conv1(silu(h)) + proj(emb(t))))
//   eps = conv_out(silu(h))
class ToyNet {
 public:
  using Matrix = Eigen::MatrixXd;

  // Activations kept by Forward for Backward. Convolution inputs are
  // re-expanded during the backward pass instead of being stored.
  struct Tape {
    int num_subbands = 0;
    int num_frames = 0;
    Eigen::VectorXd embedding;
    Eigen::VectorXd embed_pre;
    Matrix input;
    std::vector<Matrix> block_in;
    std::vector<Matrix> block_mid;
    Matrix final_pre;
  };

  explicit ToyNet(ToyNetConfig cfg);

  const ToyNetConfig& config() const { return cfg_; }

  // He-style initialization with a zero output layer.
  void InitRandom(Rng& rng);

  int64_t num_params() const { return static_cast<int64_t>(params_.size()); }
  ParamVector& params() { return params_; }
  const ParamVector& params() const { return params_; }

  struct NamedTensor {
    std::string name;
    std::vector<int> shape;
    int64_t offset;
    int64_t size;
  };
  // Layout of the flat parameter vector, in storage order.
  const std::vector<NamedTensor>& layout() const { return layout_; }

  FactorizedSpec Forward(const FactorizedSpec& x, double t,
                         Tape* tape = nullptr) const;

  // Accumulates dLoss/dparams into `grad` (resized if empty) given
  // dLoss/doutput for the forward pass recorded in `tape`.
  void Backward(const Tape& tape, const FactorizedSpec& d_out,
                ParamVector& grad) const;

 private:
  struct Conv {
    int64_t w_offset;
    int64_t b_offset;
    int in_ch;
    int out_ch;
    int dil_freq;
  };
  struct Dense {
    int64_t w_offset;
    int64_t b_offset;
    int in_dim;
    int out_dim;
  };

  Conv AddConv(const std::string& name, int in_ch, int out_ch, int dil_freq);
  Dense AddDense(const std::string& name, int in_dim, int out_dim);

  Matrix ConvForward(const Conv& conv, const Matrix& in, int n, int w) const;
  // Returns dLoss/dinput when `need_input_grad`, accumulating weight grads.
  Matrix ConvBackward(const Conv& conv, const Matrix& in, const Matrix& d_out,
                      int n, int w, ParamVector& grad,
                      bool need_input_grad) const;

  ToyNetConfig cfg_;
  ParamVector params_;
  std::vector<NamedTensor> layout_;
  Dense embed_;
  Conv conv_in_;
  std::vector<Conv> conv1_;
  std::vector<Dense> proj_;
  std::vector<Conv> conv2_;
  Conv conv_out_;
};

// Denoiser adapter around a trained ToyNet.
class ToyDenoiser : public Denoiser {
 public:
  explicit ToyDenoiser(std::shared_ptr<const ToyNet> net);

  FactorizedSpec Evaluate(const FactorizedSpec& x_t, double t,
                          const PatchLocation& where = {}) const override;
  int window_frames() const override;

  const ToyNet& net() const { return *net_; }

 private:
  std::shared_ptr<const ToyNet> net_;
};

}  // namespace sbrestore

#endif  // SBRESTORE_TOY_NET_H_
