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

#ifndef FNSUP_NOISE_HPP_
#define FNSUP_NOISE_HPP_

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fnsup/grid.hpp"
#include "fnsup/rng.hpp"

namespace fnsup {

struct NoiseSpec;

struct IidGaussian {
  double sigma = 0.0;
};
/// Uniform on [-halfwidth, +halfwidth].
struct IidUniform {
  double halfwidth = 0.0;
};
struct IidLaplace {
  double scale = 0.0;
};
/// k ~ Poisson(peak * z), output k / peak - z.
struct PoissonCentered {
  double peak = 0.0;
  ImageGrid reference;
};
/// n ~ N(0, alpha * z + beta) per pixel.
struct HetGaussian {
  double alpha = 0.0;
  double beta = 0.0;
  ImageGrid reference;
};
/// n = kernel (*) eta with eta drawn from an i.i.d. family.
struct Stationary {
  ImageGrid kernel;
  std::shared_ptr<const NoiseSpec> inner;
};
enum class StripeAxis { Column, Row };
/// Column: n[u,v] = s[v], constant along u. Row: n[u,v] = s[u].
struct Stripe {
  double sigma = 0.0;
  StripeAxis axis = StripeAxis::Column;
};
struct PeriodicComponent {
  int k0 = 0;
  int l0 = 0;
  double sigma_amp = 0.0;
};
/// Sum of A cos(2pi(k0 u/U + l0 v/V) + phi), A ~ N(0, sigma_amp^2),
/// phi ~ U[0, 2pi), fresh per realization.
struct Periodic {
  std::vector<PeriodicComponent> components;
};
struct Mixture {
  std::vector<NoiseSpec> parts;
};

struct NoiseSpec {
  using Variant = std::variant<IidGaussian, IidUniform, IidLaplace, PoissonCentered, HetGaussian,
                               Stationary, Stripe, Periodic, Mixture>;
  Variant v;

  NoiseSpec() : v(IidGaussian{}) {}
  template <typename T,
            typename = std::enable_if_t<std::is_constructible_v<Variant, T&&> &&
                                        !std::is_same_v<std::decay_t<T>, NoiseSpec>>>
  NoiseSpec(T&& alt) : v(std::forward<T>(alt)) {}

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&v);
  }
  bool is_iid() const;
  std::string family() const;
};

NoiseSpec make_stationary(ImageGrid kernel, NoiseSpec inner);

/// Copy of `spec` whose signal-dependent parts (Poisson, heteroscedastic)
/// use `z` as their reference image.
NoiseSpec with_reference(const NoiseSpec& spec, const ImageGrid& z);

/// Per-pixel variance of an i.i.d. family (sigma^2, w^2/3, 2b^2).
double iid_variance(const NoiseSpec& spec);

/// Throws InvalidParam / DimensionMismatch when the spec cannot be sampled on U x V.
void validate(const NoiseSpec& spec, Eigen::Index U, Eigen::Index V);

/// One zero-mean realization, deterministic in (spec, U, V, seed).
ImageGrid sample_noise(const NoiseSpec& spec, Eigen::Index U, Eigen::Index V, const RngSeed& seed);

struct DegradationSpec {
  enum class Kind { Identity, Blur };
  Kind kind = Kind::Identity;
  ImageGrid blur_kernel;  // U x V, wrapped; used when kind == Blur
  std::optional<NoiseSpec> noise;
};

struct TrainingPair {
  ImageGrid x;
  ImageGrid y;
};

/// x = degrade(z) + input noise on stream split(0); y = z + target noise on
/// stream split(1).
TrainingPair make_training_pair(const ImageGrid& z, const DegradationSpec& input,
                                const NoiseSpec& target, const RngSeed& seed);

/// Procedural test image in [0,1]: smooth low-pass texture plus `complexity`
/// random rectangles and discs with hard edges.
ImageGrid gen_clean(const RngSeed& seed, Eigen::Index U, Eigen::Index V, int complexity);

}  // namespace fnsup

#endif  // FNSUP_NOISE_HPP_
