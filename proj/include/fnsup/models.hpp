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

#ifndef FNSUP_MODELS_HPP_
#define FNSUP_MODELS_HPP_

#include <memory>
#include <string>
#include <vector>

#include "fnsup/grid.hpp"
#include "fnsup/rng.hpp"
#include "fnsup/spectral_stats.hpp"

namespace fnsup {

enum class ModelKind { SpectralDiagonal = 1, ConvNet = 2 };

/// Restoration function f_theta with a flat parameter vector. forward and
/// backward are const and keep no state, so one model can be evaluated from
/// several threads at once.
class Model {
 public:
  virtual ~Model() = default;
  virtual ModelKind kind() const = 0;
  virtual ImageGrid forward(const ImageGrid& x) const = 0;
  /// d loss / d theta given d loss / d f(x).
  virtual Eigen::VectorXd backward(const ImageGrid& x, const ImageGrid& upstream) const = 0;
  /// Restores structural constraints after a parameter update.
  virtual void project() {}
  virtual std::unique_ptr<Model> clone() const = 0;

  Eigen::VectorXd& params() { return theta_; }
  const Eigen::VectorXd& params() const { return theta_; }

 protected:
  Eigen::VectorXd theta_;
};

/// f = Re synth(W .* dft_forward(x)). Parameters are (re, im) of W[k,l],
/// interleaved, row-major over bins.
class SpectralDiagonalModel : public Model {
 public:
  SpectralDiagonalModel(Eigen::Index U, Eigen::Index V);
  explicit SpectralDiagonalModel(const Spectrum& gains);

  ModelKind kind() const override { return ModelKind::SpectralDiagonal; }
  ImageGrid forward(const ImageGrid& x) const override;
  Eigen::VectorXd backward(const ImageGrid& x, const ImageGrid& upstream) const override;
  void project() override;
  std::unique_ptr<Model> clone() const override;

  Eigen::Index rows() const { return U_; }
  Eigen::Index cols() const { return V_; }
  Spectrum gains() const;
  void set_gains(const Spectrum& W);

 private:
  Eigen::Index U_, V_;
};

struct ConvLayer {
  int size = 3;  // odd
  int in_channels = 1;
  int out_channels = 1;
  Eigen::Index offset = 0;  // weights (out, in, ky, kx) then biases (out)

  Eigen::Index weight_count() const {
    return static_cast<Eigen::Index>(out_channels) * in_channels * size * size;
  }
  Eigen::Index param_count() const { return weight_count() + out_channels; }
};

struct ConvNetShape {
  int layers = 3;
  int kernel = 3;
  int channels = 8;
};

/// Single-channel residual conv stack with circular padding and ReLU between
/// layers: f(x) = x + net(x).
class ConvNetModel : public Model {
 public:
  explicit ConvNetModel(const std::vector<ConvLayer>& layers);
  explicit ConvNetModel(const ConvNetShape& shape = {});

  ModelKind kind() const override { return ModelKind::ConvNet; }
  ImageGrid forward(const ImageGrid& x) const override;
  Eigen::VectorXd backward(const ImageGrid& x, const ImageGrid& upstream) const override;
  std::unique_ptr<Model> clone() const override;

  const std::vector<ConvLayer>& layers() const { return layers_; }
  /// Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  void init_uniform(const RngSeed& seed);

 private:
  std::vector<ConvLayer> layers_;
};

ImageGrid model_forward(const Model& model, const ImageGrid& x);
Eigen::VectorXd model_backward(const Model& model, const ImageGrid& x, const ImageGrid& upstream);

/// W = S_z / (S_z + S_n) per bin, 1 where both vanish.
SpectralDiagonalModel wiener_oracle(const VarianceMap& signal_psd, const VarianceMap& noise_psd);

}  // namespace fnsup

#endif  // FNSUP_MODELS_HPP_
