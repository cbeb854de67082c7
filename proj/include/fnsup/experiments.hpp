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

#ifndef FNSUP_EXPERIMENTS_HPP_
#define FNSUP_EXPERIMENTS_HPP_

#include <optional>
#include <vector>

#include "fnsup/models.hpp"
#include "fnsup/noise.hpp"
#include "fnsup/train.hpp"

namespace fnsup {

/// `count` procedural images; image i uses seed.split(i).
std::vector<ImageGrid> procedural_images(int count, Eigen::Index size, int complexity,
                                         const RngSeed& seed);

/// Denoising examples: x = z + input noise (none if absent), y = z + target
/// noise; example i uses seed.split(i).
std::vector<Example> make_examples(const std::vector<ImageGrid>& clean,
                                   const std::optional<NoiseSpec>& input_noise,
                                   const NoiseSpec& target_noise, const RngSeed& seed);

struct WienerSetup {
  Eigen::Index size = 32;
  int images = 1000;
  NoiseSpec signal = make_stationary(box_kernel(3, 32, 32), IidGaussian{0.3});
  NoiseSpec noise = NoiseSpec{IidGaussian{0.1}};
  TrainConfig train = default_train();
  std::uint64_t seed = 0;

  static TrainConfig default_train() {
    TrainConfig t;
    t.optimizer = OptimizerSpec::adam(0.01);
    t.schedule = LrSchedule::Cosine;
    t.epochs = 40;
    t.batch_size = 8;
    return t;
  }
};

struct WienerOutcome {
  double rms_gain_error = 0.0;  // sqrt(mean |W_learned - W_oracle|^2) over all bins
  SpectralDiagonalModel learned{1, 1};
  SpectralDiagonalModel oracle{1, 1};
};

/// Trains a SpectralDiagonal model with a spatial L2 loss against clean
/// targets on stationary Gaussian signals and compares it with the Wiener
/// gains computed from the analytic signal and noise spectra.
WienerOutcome wiener_experiment(const WienerSetup& setup);

}  // namespace fnsup

#endif  // FNSUP_EXPERIMENTS_HPP_
