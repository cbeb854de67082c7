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

#ifndef FNSUP_LOSSES_HPP_
#define FNSUP_LOSSES_HPP_

#include <string>
#include <vector>

#include "fnsup/grid.hpp"
#include "fnsup/noise.hpp"
#include "fnsup/parallel.hpp"
#include "fnsup/penalty.hpp"

namespace fnsup {

/// FourierFull: sum over all U x V bins of phi(da) + phi(db).
/// FourierK0:   same sum restricted to the k = 0 row.
/// SpatialL2:   sum (f - y)^2.
struct LossSpec {
  enum class Kind { FourierFull, FourierK0, SpatialL2 };
  Kind kind = Kind::FourierFull;
  Penalty phi = Penalty::huber();

  static LossSpec fourier_full(Penalty p) { return {Kind::FourierFull, p}; }
  static LossSpec fourier_k0(Penalty p) { return {Kind::FourierK0, p}; }
  static LossSpec spatial_l2() { return {Kind::SpatialL2, Penalty::abs_pow(2.0)}; }
  std::string describe() const;
};

double loss_eval(const LossSpec& spec, const ImageGrid& f, const ImageGrid& y);

/// d loss / d f via the adjoint of the direct-sum DFT.
ImageGrid loss_grad(const LossSpec& spec, const ImageGrid& f, const ImageGrid& y);

/// k = 0 row of dft_forward(x), computed from column sums (length V).
Eigen::ArrayXcd k0_row(const ImageGrid& x);

/// Sum of loss_eval(spec, model.forward(x_s), y_s), reduced in index order.
template <typename Model>
double dataset_loss(const LossSpec& spec, const std::vector<TrainingPair>& pairs,
                    const Model& model) {
  if (pairs.empty()) throw InvalidParam("dataset_loss: empty dataset");
  const auto parts = parallel_map<double>(pairs.size(), [&](std::size_t i) {
    return loss_eval(spec, model.forward(pairs[i].x), pairs[i].y);
  });
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

}  // namespace fnsup

#endif  // FNSUP_LOSSES_HPP_
