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

#ifndef FNSUP_PENALTY_HPP_
#define FNSUP_PENALTY_HPP_

#include <string>
#include <vector>

#include "fnsup/grid.hpp"

namespace fnsup {

/// phi(t) = |t|^q (AbsPow) or the Huber function with transition delta.
struct Penalty {
  enum class Kind { AbsPow, Huber };
  Kind kind = Kind::Huber;
  double param = 0.03;  // q for AbsPow, delta for Huber

  static Penalty abs_pow(double q);
  static Penalty huber(double delta = 0.03);
  std::string describe() const;
};

double penalty_eval(const Penalty& phi, double t);
/// Throws NonDifferentiable for AbsPow with q < 1 at t == 0.
double penalty_grad(const Penalty& phi, double t);

/// Points where phi is not smooth: {0} for AbsPow, {-delta, +delta} for Huber.
std::vector<double> penalty_kinks(const Penalty& phi);

/// Composite Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussLegendre gauss_legendre(int order);

/// phi convolved with the N(0, sigma^2) density. `order` is the
/// Gauss-Legendre order per panel; panels are split at the kinks of phi and
/// are at most 2 sigma long over [-12 sigma, 12 sigma].
struct BlurredPenalty {
  Penalty base;
  int order = 16;

  double eval(double t, double sigma) const;
  double derivative(double t, double sigma) const;
};

double blurred_penalty_eval(const BlurredPenalty& bp, double t, double sigma);

/// Scans 201 points on [-10 sigma, 10 sigma]: strictly decreasing left of 0,
/// strictly increasing right of 0.
bool argmin_check(const BlurredPenalty& bp, double sigma);

}  // namespace fnsup

#endif  // FNSUP_PENALTY_HPP_
