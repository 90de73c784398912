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

#include "sbrestore/toy_net.h"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace sbrestore {
namespace {

using Matrix = ToyNet::Matrix;
using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using MutVecMap = Eigen::Map<Eigen::VectorXd>;

constexpr int kTaps = 9;

Matrix Silu(const Matrix& z) {
  return (z.array() / (1.0 + (-z.array()).exp())).matrix();
}

// d silu(z) / dz = s(z) * (1 + z * (1 - s(z))), s the logistic function.
Matrix SiluGrad(const Matrix& z) {
  const Eigen::ArrayXXd s = 1.0 / (1.0 + (-z.array()).exp());
  return (s * (1.0 + z.array() * (1.0 - s))).matrix();
}

Eigen::VectorXd SiluVec(const Eigen::VectorXd& z) {
  return (z.array() / (1.0 + (-z.array()).exp())).matrix();
}

Eigen::VectorXd SiluGradVec(const Eigen::VectorXd& z) {
  const Eigen::ArrayXd s = 1.0 / (1.0 + (-z.array()).exp());
  return (s * (1.0 + z.array() * (1.0 - s))).matrix();
}

// Column p = j * n + i of `in` is the channel vector at (subband i, frame j).
// Row block k of `cols` holds the input shifted by tap k of a 3x3 kernel
// with frequency dilation `dil`; out-of-range taps read zero.
void Im2Col(const Matrix& in, int n, int w, int dil, Matrix& cols) {
  const int c = static_cast<int>(in.rows());
  const int64_t stride = static_cast<int64_t>(kTaps) * c;
  cols.resize(stride, static_cast<Eigen::Index>(n) * w);
  double* dst = cols.data();
  const double* src = in.data();
  for (int j = 0; j < w; ++j) {
    for (int i = 0; i < n; ++i) {
      double* col = dst + (static_cast<int64_t>(j) * n + i) * stride;
      for (int k = 0; k < kTaps; ++k) {
        const int ii = i + (k / 3 - 1) * dil;
        const int jj = j + (k % 3 - 1);
        double* seg = col + static_cast<int64_t>(k) * c;
        if (ii < 0 || ii >= n || jj < 0 || jj >= w) {
          std::memset(seg, 0, sizeof(double) * c);
        } else {
          std::memcpy(seg, src + (static_cast<int64_t>(jj) * n + ii) * c,
                      sizeof(double) * c);
        }
      }
    }
  }
}

// Adjoint of Im2Col.
void Col2ImAdd(const Matrix& cols, int n, int w, int dil, Matrix& in_grad) {
  const int c = static_cast<int>(in_grad.rows());
  const int64_t stride = static_cast<int64_t>(kTaps) * c;
  const double* src = cols.data();
  double* dst = in_grad.data();
  for (int j = 0; j < w; ++j) {
    for (int i = 0; i < n; ++i) {
      const double* col = src + (static_cast<int64_t>(j) * n + i) * stride;
      for (int k = 0; k < kTaps; ++k) {
        const int ii = i + (k / 3 - 1) * dil;
        const int jj = j + (k % 3 - 1);
        if (ii < 0 || ii >= n || jj < 0 || jj >= w) continue;
        const double* seg = col + static_cast<int64_t>(k) * c;
        double* out = dst + (static_cast<int64_t>(jj) * n + ii) * c;
        for (int ch = 0; ch < c; ++ch) out[ch] += seg[ch];
      }
    }
  }
}

}  // namespace

Eigen::VectorXd TimeEmbedding(double t) {
  constexpr int kHalf = kTimeEmbeddingDim / 2;
  Eigen::VectorXd e(kTimeEmbeddingDim);
  for (int k = 0; k < kHalf; ++k) {
    const double freq = std::exp(-std::log(10000.0) * k / kHalf);
    const double arg = 1000.0 * t * freq;
    e[k] = std::sin(arg);
    e[k + kHalf] = std::cos(arg);
  }
  return e;
}

ToyNet::Conv ToyNet::AddConv(const std::string& name, int in_ch, int out_ch,
                             int dil_freq) {
  Conv c{0, 0, in_ch, out_ch, dil_freq};
  c.w_offset = static_cast<int64_t>(params_.size());
  const int64_t wsize = static_cast<int64_t>(out_ch) * kTaps * in_ch;
  layout_.push_back({name + ".weight", {out_ch, kTaps * in_ch}, c.w_offset,
                     wsize});
  params_.resize(params_.size() + wsize, 0.0);
  c.b_offset = static_cast<int64_t>(params_.size());
  layout_.push_back({name + ".bias", {out_ch}, c.b_offset, out_ch});
  params_.resize(params_.size() + out_ch, 0.0);
  return c;
}

ToyNet::Dense ToyNet::AddDense(const std::string& name, int in_dim,
                               int out_dim) {
  Dense d{0, 0, in_dim, out_dim};
  d.w_offset = static_cast<int64_t>(params_.size());
  const int64_t wsize = static_cast<int64_t>(out_dim) * in_dim;
  layout_.push_back({name + ".weight", {out_dim, in_dim}, d.w_offset, wsize});
  params_.resize(params_.size() + wsize, 0.0);
  d.b_offset = static_cast<int64_t>(params_.size());
  layout_.push_back({name + ".bias", {out_dim}, d.b_offset, out_dim});
  params_.resize(params_.size() + out_dim, 0.0);
  return d;
}

ToyNet::ToyNet(ToyNetConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.channels < 1 || cfg_.blocks < 0 || cfg_.embed_hidden < 1 ||
      cfg_.window_frames < 1 || cfg_.freq_dilations.empty()) {
    throw std::invalid_argument("invalid toy network configuration");
  }
  for (int d : cfg_.freq_dilations) {
    if (d < 1) throw std::invalid_argument("dilations must be >= 1");
  }
  const int c = cfg_.channels;
  embed_ = AddDense("embed", kTimeEmbeddingDim, cfg_.embed_hidden);
  conv_in_ = AddConv("conv_in", 4, c, 1);
  for (int b = 0; b < cfg_.blocks; ++b) {
    const std::string prefix = "block" + std::to_string(b);
    conv1_.push_back(AddConv(prefix + ".conv1", c, c, 1));
    proj_.push_back(AddDense(prefix + ".proj", cfg_.embed_hidden, c));
    const int dil =
        cfg_.freq_dilations[b % static_cast<int>(cfg_.freq_dilations.size())];
    conv2_.push_back(AddConv(prefix + ".conv2", c, c, dil));
  }
  conv_out_ = AddConv("conv_out", c, 3, 1);
}

void ToyNet::InitRandom(Rng& rng) {
  auto fill = [&](int64_t offset, int64_t size, double stddev) {
    for (int64_t k = 0; k < size; ++k) params_[offset + k] = stddev * rng.Normal();
  };
  auto init_conv = [&](const Conv& c, double gain) {
    fill(c.w_offset, static_cast<int64_t>(c.out_ch) * kTaps * c.in_ch,
         gain * std::sqrt(2.0 / (kTaps * c.in_ch)));
    std::fill_n(params_.begin() + c.b_offset, c.out_ch, 0.0);
  };
  auto init_dense = [&](const Dense& d, double gain) {
    fill(d.w_offset, static_cast<int64_t>(d.out_dim) * d.in_dim,
         gain * std::sqrt(2.0 / d.in_dim));
    std::fill_n(params_.begin() + d.b_offset, d.out_dim, 0.0);
  };
  init_dense(embed_, 1.0);
  init_conv(conv_in_, 1.0);
  for (int b = 0; b < cfg_.blocks; ++b) {
    init_conv(conv1_[b], 1.0);
    init_dense(proj_[b], 0.5);
    init_conv(conv2_[b], 0.3);
  }
  init_conv(conv_out_, 0.0);
}

Matrix ToyNet::ConvForward(const Conv& conv, const Matrix& in, int n,
                           int w) const {
  Matrix cols;
  Im2Col(in, n, w, conv.dil_freq, cols);
  const ConstMap weight(params_.data() + conv.w_offset, conv.out_ch,
                        kTaps * conv.in_ch);
  const ConstVecMap bias(params_.data() + conv.b_offset, conv.out_ch);
  Matrix out(conv.out_ch, cols.cols());
  out.noalias() = weight * cols;
  out.colwise() += bias;
  return out;
}

Matrix ToyNet::ConvBackward(const Conv& conv, const Matrix& in,
                            const Matrix& d_out, int n, int w,
                            ParamVector& grad,
                            bool need_input_grad) const {
  Matrix cols;
  Im2Col(in, n, w, conv.dil_freq, cols);
  MutMap d_weight(grad.data() + conv.w_offset, conv.out_ch,
                  kTaps * conv.in_ch);
  MutVecMap d_bias(grad.data() + conv.b_offset, conv.out_ch);
  d_weight.noalias() += d_out * cols.transpose();
  d_bias += d_out.rowwise().sum();
  if (!need_input_grad) return Matrix();
  const ConstMap weight(params_.data() + conv.w_offset, conv.out_ch,
                        kTaps * conv.in_ch);
  Matrix d_cols(cols.rows(), cols.cols());
  d_cols.noalias() = weight.transpose() * d_out;
  Matrix d_in = Matrix::Zero(in.rows(), in.cols());
  Col2ImAdd(d_cols, n, w, conv.dil_freq, d_in);
  return d_in;
}

FactorizedSpec ToyNet::Forward(const FactorizedSpec& x, double t,
                               Tape* tape) const {
  const int n = x.num_subbands(), w = x.num_frames();
  const Eigen::Index cells = static_cast<Eigen::Index>(n) * w;
  Matrix input(4, cells);
  for (int k = 0; k < 3; ++k) {
    input.row(k) = Eigen::Map<const Eigen::RowVectorXd>(x.ch[k].data(), cells);
  }
  for (int j = 0; j < w; ++j) {
    for (int i = 0; i < n; ++i) {
      input(3, static_cast<Eigen::Index>(j) * n + i) =
          n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
    }
  }

  const Eigen::VectorXd emb = TimeEmbedding(t);
  const Eigen::VectorXd embed_pre =
      ConstMap(params_.data() + embed_.w_offset, embed_.out_dim,
               embed_.in_dim) *
          emb +
      ConstVecMap(params_.data() + embed_.b_offset, embed_.out_dim);
  const Eigen::VectorXd hidden = SiluVec(embed_pre);

  Matrix h = ConvForward(conv_in_, input, n, w);
  if (tape != nullptr) {
    tape->num_subbands = n;
    tape->num_frames = w;
    tape->embedding = emb;
    tape->embed_pre = embed_pre;
    tape->input = input;
    tape->block_in.clear();
    tape->block_mid.clear();
  }
  for (int b = 0; b < cfg_.blocks; ++b) {
    const Eigen::VectorXd shift =
        ConstMap(params_.data() + proj_[b].w_offset, proj_[b].out_dim,
                 proj_[b].in_dim) *
            hidden +
        ConstVecMap(params_.data() + proj_[b].b_offset, proj_[b].out_dim);
    Matrix mid = ConvForward(conv1_[b], Silu(h), n, w);
    mid.colwise() += shift;
    Matrix delta = ConvForward(conv2_[b], Silu(mid), n, w);
    if (tape != nullptr) {
      tape->block_in.push_back(h);
      tape->block_mid.push_back(mid);
    }
    h += delta;
  }
  const Matrix y = ConvForward(conv_out_, Silu(h), n, w);
  if (tape != nullptr) tape->final_pre = std::move(h);

  FactorizedSpec out = FactorizedSpec::Zero(n, w, x.rho);
  for (int k = 0; k < 3; ++k) {
    Eigen::Map<Eigen::RowVectorXd>(out.ch[k].data(), cells) = y.row(k);
  }
  return out;
}

void ToyNet::Backward(const Tape& tape, const FactorizedSpec& d_out,
                      ParamVector& grad) const {
  if (grad.empty()) grad.assign(params_.size(), 0.0);
  if (grad.size() != params_.size()) {
    throw std::invalid_argument("gradient buffer has the wrong size");
  }
  const int n = tape.num_subbands, w = tape.num_frames;
  if (d_out.num_subbands() != n || d_out.num_frames() != w) {
    throw std::invalid_argument("output gradient shape mismatch");
  }
  const Eigen::Index cells = static_cast<Eigen::Index>(n) * w;
  Matrix dy(3, cells);
  for (int k = 0; k < 3; ++k) {
    dy.row(k) = Eigen::Map<const Eigen::RowVectorXd>(d_out.ch[k].data(), cells);
  }

  Matrix dh = ConvBackward(conv_out_, Silu(tape.final_pre), dy, n, w, grad,
                           true);
  dh.array() *= SiluGrad(tape.final_pre).array();

  const Eigen::VectorXd hidden = SiluVec(tape.embed_pre);
  Eigen::VectorXd d_hidden = Eigen::VectorXd::Zero(cfg_.embed_hidden);
  for (int b = cfg_.blocks - 1; b >= 0; --b) {
    const Matrix& mid = tape.block_mid[b];
    const Matrix& h_in = tape.block_in[b];
    Matrix d_mid = ConvBackward(conv2_[b], Silu(mid), dh, n, w, grad, true);
    d_mid.array() *= SiluGrad(mid).array();

    const Eigen::VectorXd d_shift = d_mid.rowwise().sum();
    MutMap(grad.data() + proj_[b].w_offset, proj_[b].out_dim, proj_[b].in_dim)
        .noalias() += d_shift * hidden.transpose();
    MutVecMap(grad.data() + proj_[b].b_offset, proj_[b].out_dim) += d_shift;
    d_hidden.noalias() +=
        ConstMap(params_.data() + proj_[b].w_offset, proj_[b].out_dim,
                 proj_[b].in_dim)
            .transpose() *
        d_shift;

    Matrix d_act = ConvBackward(conv1_[b], Silu(h_in), d_mid, n, w, grad,
                                true);
    dh.array() += d_act.array() * SiluGrad(h_in).array();
  }
  ConvBackward(conv_in_, tape.input, dh, n, w, grad, false);

  const Eigen::VectorXd d_pre =
      (d_hidden.array() * SiluGradVec(tape.embed_pre).array()).matrix();
  MutMap(grad.data() + embed_.w_offset, embed_.out_dim, embed_.in_dim)
      .noalias() += d_pre * tape.embedding.transpose();
  MutVecMap(grad.data() + embed_.b_offset, embed_.out_dim) += d_pre;
}

ToyDenoiser::ToyDenoiser(std::shared_ptr<const ToyNet> net)
    : net_(std::move(net)) {
  if (net_ == nullptr) throw std::invalid_argument("null network");
}

FactorizedSpec ToyDenoiser::Evaluate(const FactorizedSpec& x_t, double t,
                                     const PatchLocation&) const {
  if (x_t.num_frames() > window_frames()) {
    throw std::invalid_argument(
        "input of " + std::to_string(x_t.num_frames()) +
        " frames exceeds the denoiser window of " +
        std::to_string(window_frames()));
  }
  return net_->Forward(x_t, t);
}

int ToyDenoiser::window_frames() const {
  return net_->config().window_frames;
}

}  // namespace sbrestore
