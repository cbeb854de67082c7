// Copyright 2026 The fnsup Authors
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

#include "fnsup/models.hpp"

#include <cmath>
#include <random>

namespace fnsup {

// ---------------------------------------------------------------- spectral

SpectralDiagonalModel::SpectralDiagonalModel(Eigen::Index U, Eigen::Index V) : U_(U), V_(V) {
  if (U < 1 || V < 1) throw DimensionMismatch("SpectralDiagonalModel: empty grid");
  theta_ = Eigen::VectorXd::Zero(2 * U * V);
  for (Eigen::Index i = 0; i < U * V; ++i) theta_(2 * i) = 1.0;
}

SpectralDiagonalModel::SpectralDiagonalModel(const Spectrum& gains)
    : SpectralDiagonalModel(gains.rows(), gains.cols()) {
  set_gains(gains);
}

Spectrum SpectralDiagonalModel::gains() const {
  Spectrum W(U_, V_);
  for (Eigen::Index i = 0; i < U_ * V_; ++i) W.data()[i] = {theta_(2 * i), theta_(2 * i + 1)};
  return W;
}

void SpectralDiagonalModel::set_gains(const Spectrum& W) {
  if (W.rows() != U_ || W.cols() != V_) throw DimensionMismatch("set_gains: shape");
  for (Eigen::Index i = 0; i < U_ * V_; ++i) {
    theta_(2 * i) = W.data()[i].real();
    theta_(2 * i + 1) = W.data()[i].imag();
  }
}

ImageGrid SpectralDiagonalModel::forward(const ImageGrid& x) const {
  if (x.rows() != U_ || x.cols() != V_) {
    throw DimensionMismatch("SpectralDiagonalModel: input " + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()) + ", model " + std::to_string(U_) + "x" +
                            std::to_string(V_));
  }
  const Spectrum Y = gains() * dft_forward(x);
  return dft_synthesize(Y).real();
}

Eigen::VectorXd SpectralDiagonalModel::backward(const ImageGrid& x,
                                                const ImageGrid& upstream) const {
  if (x.rows() != U_ || x.cols() != V_) throw DimensionMismatch("SpectralDiagonalModel: input");
  require_same_shape(x, upstream, "SpectralDiagonalModel::backward");
  // dL/dW = UV conj(F(x)) F(G), as (d/dRe, d/dIm).
  const Spectrum g =
      dft_forward(x).conjugate() * dft_forward(upstream) * static_cast<double>(U_ * V_);
  Eigen::VectorXd out(2 * U_ * V_);
  for (Eigen::Index i = 0; i < U_ * V_; ++i) {
    out(2 * i) = g.data()[i].real();
    out(2 * i + 1) = g.data()[i].imag();
  }
  return out;
}

void SpectralDiagonalModel::project() {
  Spectrum W = gains();
  hermitian_project(W);
  set_gains(W);
}

std::unique_ptr<Model> SpectralDiagonalModel::clone() const {
  return std::make_unique<SpectralDiagonalModel>(*this);
}

// ---------------------------------------------------------------- convnet

namespace {

using Channels = std::vector<ImageGrid>;

ImageGrid pad_circular(const ImageGrid& x, int r) {
  const Eigen::Index U = x.rows(), V = x.cols();
  ImageGrid p(U + 2 * r, V + 2 * r);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const Eigen::Index u = ((i - r) % U + U) % U;
    for (Eigen::Index j = 0; j < p.cols(); ++j) p(i, j) = x(u, ((j - r) % V + V) % V);
  }
  return p;
}

// out[o](u,v) = b[o] + sum_{i,dy,dx} w[o,i,dy,dx] in[i](u+dy-r, v+dx-r)
Channels conv_forward(const ConvLayer& L, const double* theta, const Channels& in) {
  const Eigen::Index U = in[0].rows(), V = in[0].cols();
  const int s = L.size, r = s / 2;
  const double* w = theta + L.offset;
  const double* b = w + L.weight_count();
  Channels padded(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) padded[i] = pad_circular(in[i], r);
  Channels out(static_cast<std::size_t>(L.out_channels));
  for (int o = 0; o < L.out_channels; ++o) {
    ImageGrid acc = ImageGrid::Constant(U, V, b[o]);
    for (int i = 0; i < L.in_channels; ++i) {
      const double* wk = w + (static_cast<Eigen::Index>(o) * L.in_channels + i) * s * s;
      for (int dy = 0; dy < s; ++dy) {
        for (int dx = 0; dx < s; ++dx) acc += wk[dy * s + dx] * padded[i].block(dy, dx, U, V);
      }
    }
    out[o] = std::move(acc);
  }
  return out;
}

// Accumulates parameter gradients into grad and returns d loss / d in.
Channels conv_backward(const ConvLayer& L, const double* theta, const Channels& in,
                       const Channels& gout, double* grad, bool need_input_grad) {
  const Eigen::Index U = in[0].rows(), V = in[0].cols();
  const int s = L.size, r = s / 2;
  const double* w = theta + L.offset;
  double* gw = grad + L.offset;
  double* gb = gw + L.weight_count();
  Channels padded(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) padded[i] = pad_circular(in[i], r);
  for (int o = 0; o < L.out_channels; ++o) {
    gb[o] += gout[o].sum();
    for (int i = 0; i < L.in_channels; ++i) {
      double* gk = gw + (static_cast<Eigen::Index>(o) * L.in_channels + i) * s * s;
      for (int dy = 0; dy < s; ++dy) {
        for (int dx = 0; dx < s; ++dx) {
          gk[dy * s + dx] += (gout[o] * padded[i].block(dy, dx, U, V)).sum();
        }
      }
    }
  }
  Channels gin;
  if (!need_input_grad) return gin;
  gin.assign(static_cast<std::size_t>(L.in_channels), ImageGrid::Zero(U, V));
  for (int o = 0; o < L.out_channels; ++o) {
    const ImageGrid q = pad_circular(gout[o], r);
    for (int i = 0; i < L.in_channels; ++i) {
      const double* wk = w + (static_cast<Eigen::Index>(o) * L.in_channels + i) * s * s;
      for (int dy = 0; dy < s; ++dy) {
        for (int dx = 0; dx < s; ++dx) {
          gin[i] += wk[dy * s + dx] * q.block(2 * r - dy, 2 * r - dx, U, V);
        }
      }
    }
  }
  return gin;
}

std::vector<ConvLayer> layers_from_shape(const ConvNetShape& shape) {
  if (shape.layers < 1 || shape.kernel < 1 || shape.kernel % 2 == 0 || shape.channels < 1) {
    throw InvalidParam("ConvNetShape: need layers >= 1, odd kernel, channels >= 1");
  }
  std::vector<ConvLayer> out;
  for (int i = 0; i < shape.layers; ++i) {
    ConvLayer L;
    L.size = shape.kernel;
    L.in_channels = i == 0 ? 1 : shape.channels;
    L.out_channels = i == shape.layers - 1 ? 1 : shape.channels;
    out.push_back(L);
  }
  return out;
}

}  // namespace

ConvNetModel::ConvNetModel(const std::vector<ConvLayer>& layers) : layers_(layers) {
  if (layers_.empty()) throw InvalidParam("ConvNetModel: no layers");
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    ConvLayer& L = layers_[i];
    if (L.size < 1 || L.size % 2 == 0) throw InvalidParam("ConvNetModel: kernel size must be odd");
    if (L.in_channels < 1 || L.out_channels < 1) throw InvalidParam("ConvNetModel: channels");
    if (i > 0 && L.in_channels != layers_[i - 1].out_channels) {
      throw DimensionMismatch("ConvNetModel: channel counts do not chain");
    }
    L.offset = offset;
    offset += L.param_count();
  }
  if (layers_.front().in_channels != 1 || layers_.back().out_channels != 1) {
    throw DimensionMismatch("ConvNetModel: input and output must be single-channel");
  }
  theta_ = Eigen::VectorXd::Zero(offset);
}

ConvNetModel::ConvNetModel(const ConvNetShape& shape) : ConvNetModel(layers_from_shape(shape)) {}

void ConvNetModel::init_uniform(const RngSeed& seed) {
  auto eng = seed.engine();
  for (const ConvLayer& L : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(L.in_channels * L.size * L.size));
    std::uniform_real_distribution<double> d(-bound, bound);
    for (Eigen::Index i = 0; i < L.param_count(); ++i) theta_(L.offset + i) = d(eng);
  }
}

ImageGrid ConvNetModel::forward(const ImageGrid& x) const {
  require_valid(x, "ConvNetModel::forward");
  Channels h{x};
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = conv_forward(layers_[i], theta_.data(), h);
    if (i + 1 < layers_.size()) {
      for (auto& c : h) c = c.max(0.0);
    }
  }
  return x + h[0];
}

Eigen::VectorXd ConvNetModel::backward(const ImageGrid& x, const ImageGrid& upstream) const {
  require_same_shape(x, upstream, "ConvNetModel::backward");
  const std::size_t n = layers_.size();
  std::vector<Channels> acts{Channels{x}};  // input to layer i
  std::vector<Channels> pre;                // output of layer i before ReLU
  for (std::size_t i = 0; i < n; ++i) {
    pre.push_back(conv_forward(layers_[i], theta_.data(), acts.back()));
    if (i + 1 < n) {
      Channels a = pre.back();
      for (auto& c : a) c = c.max(0.0);
      acts.push_back(std::move(a));
    }
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta_.size());
  Channels g{upstream};
  for (std::size_t ii = n; ii-- > 0;) {
    if (ii + 1 < n) {
      for (std::size_t c = 0; c < g.size(); ++c) g[c] = (pre[ii][c] > 0.0).select(g[c], 0.0);
    }
    g = conv_backward(layers_[ii], theta_.data(), acts[ii], g, grad.data(), ii > 0);
  }
  return grad;
}

std::unique_ptr<Model> ConvNetModel::clone() const { return std::make_unique<ConvNetModel>(*this); }

// ---------------------------------------------------------------- free functions

ImageGrid model_forward(const Model& model, const ImageGrid& x) { return model.forward(x); }

Eigen::VectorXd model_backward(const Model& model, const ImageGrid& x, const ImageGrid& upstream) {
  return model.backward(x, upstream);
}

SpectralDiagonalModel wiener_oracle(const VarianceMap& signal_psd, const VarianceMap& noise_psd) {
  require_same_shape(signal_psd, noise_psd, "wiener_oracle");
  if ((signal_psd < 0.0).any() || (noise_psd < 0.0).any()) {
    throw InvalidParam("wiener_oracle: power spectra must be >= 0");
  }
  const ImageGrid den = signal_psd + noise_psd;
  const ImageGrid W = (den > 0.0).select(signal_psd / den, 1.0);
  return SpectralDiagonalModel(Spectrum(W.cast<std::complex<double>>()));
}

}  // namespace fnsup
