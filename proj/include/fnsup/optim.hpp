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

#ifndef FNSUP_OPTIM_HPP_
#define FNSUP_OPTIM_HPP_

#include <string>

#include <Eigen/Core>

namespace fnsup {

struct OptimizerSpec {
  enum class Kind { SGD, Adam };
  Kind kind = Kind::Adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static OptimizerSpec sgd(double lr) { return {Kind::SGD, lr}; }
  static OptimizerSpec adam(double lr = 1e-3) { return {Kind::Adam, lr}; }
};

enum class LrSchedule { Constant, Cosine };

/// lr * 0.5 (1 + cos(pi step / total)) for Cosine, lr otherwise.
double scheduled_lr(double lr, LrSchedule schedule, long step, long total);

class Optimizer {
 public:
  explicit Optimizer(const OptimizerSpec& spec);
  /// theta -= update(grad) at learning rate lr.
  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double lr);
  const OptimizerSpec& spec() const { return spec_; }

 private:
  OptimizerSpec spec_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

}  // namespace fnsup

#endif  // FNSUP_OPTIM_HPP_
