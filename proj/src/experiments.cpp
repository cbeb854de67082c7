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

#include "fnsup/experiments.hpp"

#include <cmath>

#include "fnsup/parallel.hpp"
#include "fnsup/spectral_stats.hpp"

namespace fnsup {

std::vector<ImageGrid> procedural_images(int count, Eigen::Index size, int complexity,
                                         const RngSeed& seed) {
  if (count < 0) throw InvalidParam("procedural_images: negative count");
  return parallel_map<ImageGrid>(static_cast<std::size_t>(count), [&](std::size_t i) {
    return gen_clean(seed.split(i), size, size, complexity);
  });
}

std::vector<Example> make_examples(const std::vector<ImageGrid>& clean,
                                   const std::optional<NoiseSpec>& input_noise,
                                   const NoiseSpec& target_noise, const RngSeed& seed) {
  DegradationSpec degrade;
  degrade.noise = input_noise;
  // Signal-dependent noise follows each example's own clean image.
  return parallel_map<Example>(clean.size(), [&](std::size_t i) {
    DegradationSpec d = degrade;
    if (d.noise) d.noise = with_reference(*d.noise, clean[i]);
    TrainingPair p =
        make_training_pair(clean[i], d, with_reference(target_noise, clean[i]), seed.split(i));
    return Example{std::move(p.x), std::move(p.y), clean[i]};
  });
}

WienerOutcome wiener_experiment(const WienerSetup& s) {
  const RngSeed root{s.seed, 0x7769656eULL};
  const RngSeed zs = root.split(0), ds = root.split(1);
  const auto clean = parallel_map<ImageGrid>(static_cast<std::size_t>(s.images), [&](std::size_t i) {
    return sample_noise(s.signal, s.size, s.size, zs.split(i));
  });
  const auto data = make_examples(clean, s.noise, s.noise, ds);

  TrainConfig cfg = s.train;
  cfg.loss = LossSpec::spatial_l2();
  cfg.target = TargetMode::Clean;
  cfg.patch_size = 0;
  SpectralDiagonalModel learned(s.size, s.size);
  train(learned, data, {}, cfg);

  WienerOutcome out;
  out.oracle = wiener_oracle(variance_map_analytic(s.signal, s.size, s.size),
                             variance_map_analytic(s.noise, s.size, s.size));
  out.rms_gain_error = std::sqrt((learned.gains() - out.oracle.gains()).abs2().mean());
  out.learned = std::move(learned);
  return out;
}

}  // namespace fnsup
