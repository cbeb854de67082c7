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

#ifndef FNSUP_TRAIN_HPP_
#define FNSUP_TRAIN_HPP_

#include <vector>

#include "fnsup/losses.hpp"
#include "fnsup/models.hpp"
#include "fnsup/optim.hpp"

namespace fnsup {

enum class TargetMode { Clean, Noisy };

struct TrainConfig {
  LossSpec loss = LossSpec::fourier_full(Penalty::huber());
  OptimizerSpec optimizer = OptimizerSpec::adam();
  LrSchedule schedule = LrSchedule::Constant;
  int epochs = 10;
  int patch_size = 32;  // 0 trains on whole images
  int batch_size = 8;
  std::uint64_t seed = 0;
  TargetMode target = TargetMode::Noisy;
};

/// Degraded input x, noisy target y and the clean image z behind both.
struct Example {
  ImageGrid x;
  ImageGrid y;
  ImageGrid z;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;  // mean per training example
  double psnr = 0.0;  // mean held-out PSNR of f(x) against z (peak 1)
};

struct TrainResult {
  std::vector<EpochRecord> curve;
};

/// Mean PSNR(f(x), z) over the examples.
double heldout_psnr(const Model& model, const std::vector<Example>& heldout);

/// Minibatch training; shuffling, patch positions and reductions are all
/// fixed by config.seed. Throws DivergenceDetected on a non-finite loss.
TrainResult train(Model& model, const std::vector<Example>& data,
                  const std::vector<Example>& heldout, const TrainConfig& config);

struct UsrConfig {
  Penalty phi = Penalty::abs_pow(1.0);
  OptimizerSpec optimizer = OptimizerSpec::adam();
  double epsilon = 1.2;
  int steps = 2000;
  int batch_size = 8;
  int patch_size = 32;
  std::uint64_t seed = 0;
  int log_every = 100;
};

struct UsrRecord {
  int step = 0;
  double loss = 0.0;  // mean per patch since the previous record
  double psnr = 0.0;  // mean held-out PSNR, 0 without held-out data
};

/// x~ = f(y_i) + eps (y_j - f(y_j)), the swapped training input.
ImageGrid usr_synthesize(const Model& model, const ImageGrid& yi, const ImageGrid& yj,
                         double epsilon);

/// Noise-swapping stripe removal. Per pair (i != j): z_i = f(y_i) and
/// n_j = y_j - f(y_j) are held fixed, x~ = z_i + eps n_j, and the FourierK0
/// loss between f(x~) and y_i is minimized.
/// Held-out examples are scored as PSNR of f(x) against z.
std::vector<UsrRecord> usr_train(const std::vector<ImageGrid>& noisy, Model& model,
                                 const UsrConfig& config,
                                 const std::vector<Example>& heldout = {});

}  // namespace fnsup

#endif  // FNSUP_TRAIN_HPP_
