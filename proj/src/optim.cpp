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

#include "fnsup/optim.hpp"

#include <cmath>
#include <numbers>

#include "fnsup/errors.hpp"

namespace fnsup {

double scheduled_lr(double lr, LrSchedule schedule, long step, long total) {
  if (schedule == LrSchedule::Constant || total <= 0) return lr;
  return lr * 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(step) / static_cast<double>(total)));
}

Optimizer::Optimizer(const OptimizerSpec& spec) : spec_(spec) {
  if (!(spec.lr >= 0.0)) throw InvalidParam("optimizer: lr must be >= 0");
  if (spec.kind == OptimizerSpec::Kind::Adam &&
      !(spec.beta1 >= 0.0 && spec.beta1 < 1.0 && spec.beta2 >= 0.0 && spec.beta2 < 1.0 &&
        spec.eps > 0.0)) {
    throw InvalidParam("adam: need 0 <= beta < 1 and eps > 0");
  }
}

void Optimizer::step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double lr) {
  if (grad.size() != theta.size()) throw DimensionMismatch("optimizer: gradient size");
  if (spec_.kind == OptimizerSpec::Kind::SGD) {
    theta -= lr * grad;
    return;
  }
  if (m_.size() != theta.size()) {
    m_ = Eigen::VectorXd::Zero(theta.size());
    v_ = Eigen::VectorXd::Zero(theta.size());
    t_ = 0;
  }
  ++t_;
  m_ = spec_.beta1 * m_ + (1.0 - spec_.beta1) * grad;
  v_ = spec_.beta2 * v_ + (1.0 - spec_.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(spec_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(spec_.beta2, static_cast<double>(t_));
  theta.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + spec_.eps);
}

}  // namespace fnsup
