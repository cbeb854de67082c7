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

#include "doctest.h"
#include "oracles.hpp"

#include "fnsup/penalty.hpp"

using namespace fnsup;

TEST_CASE("closed-form penalty values") {
  const Penalty l1 = Penalty::abs_pow(1.0);
  CHECK(penalty_eval(l1, -2.0) == 2.0);
  CHECK(penalty_grad(l1, -2.0) == -1.0);
  const Penalty h = Penalty::huber(1.0);
  CHECK(penalty_eval(h, 3.0) == 2.5);
  CHECK(penalty_grad(h, 3.0) == 1.0);
  CHECK(penalty_eval(h, 0.5) == 0.125);
  CHECK(penalty_grad(h, 0.5) == 0.5);
  CHECK(penalty_eval(h, 0.0) == 0.0);
  CHECK(penalty_eval(Penalty::abs_pow(0.5), 0.0) == 0.0);
}

TEST_CASE("Huber derivative is continuous at the transition") {
  const Penalty h = Penalty::huber(0.03);
  CHECK(penalty_grad(h, 0.03 - 1e-12) == doctest::Approx(penalty_grad(h, 0.03 + 1e-12)));
  CHECK(penalty_grad(h, -0.03 - 1e-12) == doctest::Approx(penalty_grad(h, -0.03 + 1e-12)));
}

TEST_CASE("derivative at zero") {
  CHECK(penalty_grad(Penalty::abs_pow(1.0), 0.0) == 0.0);
  CHECK(penalty_grad(Penalty::abs_pow(1.5), 0.0) == 0.0);
  CHECK_THROWS_AS(penalty_grad(Penalty::abs_pow(0.5), 0.0), NonDifferentiable);
  CHECK_THROWS_AS(Penalty::abs_pow(0.0), InvalidParam);
  CHECK_THROWS_AS(Penalty::huber(-1.0), InvalidParam);
}

TEST_CASE("penalty gradients match central differences") {
  for (const Penalty& p : {Penalty::abs_pow(1.0), Penalty::abs_pow(1.7), Penalty::abs_pow(3.0),
                           Penalty::huber(0.3)}) {
    for (double t : {-2.1, -0.29, 0.11, 0.8}) {
      const double fd = (penalty_eval(p, t + 1e-6) - penalty_eval(p, t - 1e-6)) / 2e-6;
      CHECK(penalty_grad(p, t) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  for (int n : {1, 2, 5, 16, 33}) {
    const GaussLegendre gl = gauss_legendre(n);
    CHECK(gl.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
    for (int d = 0; d <= 2 * n - 1; ++d) {
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      const double q = (gl.weights.array() * gl.nodes.array().pow(d)).sum();
      CHECK(std::abs(q - exact) < 1e-13);
    }
  }
}

TEST_CASE("blurred |t| against the folded-normal mean") {
  const BlurredPenalty bp{Penalty::abs_pow(1.0)};
  CHECK(std::abs(bp.eval(0.0, 0.2) - 0.2 * std::sqrt(2.0 / std::numbers::pi)) < 1e-6);
  CHECK(std::abs(bp.eval(0.0, 0.2) - 0.159577) < 1e-6);
  for (double t : {-1.0, -0.13, 0.05, 0.4, 2.0}) {
    for (double s : {0.01, 0.2, 0.7}) {
      CHECK(std::abs(bp.eval(t, s) - oracle::folded_normal_mean(t, s)) < 1e-9);
    }
  }
  CHECK(std::abs(bp.eval(2.0, 0.2) - 2.0) < 1e-4);
}

TEST_CASE("blurred square is t^2 + sigma^2") {
  const BlurredPenalty bp{Penalty::abs_pow(2.0)};
  for (double t : {-3.0, 0.0, 0.25}) {
    for (double s : {0.0, 0.1, 2.0}) CHECK(std::abs(bp.eval(t, s) - (t * t + s * s)) < 1e-9);
  }
  // The general quadrature path agrees with the shortcut.
  const BlurredPenalty q2{Penalty::abs_pow(2.0 + 1e-15)};
  CHECK(std::abs(q2.eval(0.3, 0.5) - 0.34) < 1e-9);
}

TEST_CASE("blurred Huber against brute-force Riemann sum") {
  const BlurredPenalty bp{Penalty::huber(0.05)};
  for (double t : {0.0, 0.02, 0.07, -0.3}) {
    const double s = 0.04;
    double acc = 0.0;
    const int n = 400000;
    const double lo = -12 * s, h = 24 * s / n;
    for (int i = 0; i < n; ++i) {
      const double tau = lo + (i + 0.5) * h;
      acc += penalty_eval(bp.base, t - tau) * std::exp(-0.5 * tau * tau / (s * s)) * h;
    }
    acc /= s * std::sqrt(2.0 * std::numbers::pi);
    CHECK(std::abs(bp.eval(t, s) - acc) < 1e-9);
  }
}

TEST_CASE("sigma = 0 reproduces the base penalty exactly") {
  const BlurredPenalty bp{Penalty::huber(0.03)};
  for (double t : {-1.0, 0.01, 0.5}) CHECK(bp.eval(t, 0.0) == penalty_eval(bp.base, t));
  CHECK(blurred_penalty_eval(bp, 0.2, 0.0) == penalty_eval(bp.base, 0.2));
}

TEST_CASE("blurred penalty is even, minimal at zero and grows with sigma") {
  for (const Penalty& p : {Penalty::abs_pow(1.0), Penalty::abs_pow(1.5), Penalty::huber(0.03),
                           Penalty::huber(1.0)}) {
    const BlurredPenalty bp{p};
    double prev = -1.0;
    for (double s : {0.01, 0.05, 0.2, 0.5}) {
      const double at0 = bp.eval(0.0, s);
      CHECK(at0 > prev);
      prev = at0;
      for (int i = -100; i <= 100; ++i) {
        const double t = 10.0 * s * i / 100.0;
        CHECK(std::abs(bp.eval(t, s) - bp.eval(-t, s)) < 1e-10 * std::max(1.0, bp.eval(t, s)));
        CHECK(bp.eval(t, s) >= at0);
      }
    }
  }
}

TEST_CASE("blurred derivative matches differences of the blurred value") {
  for (const Penalty& p : {Penalty::abs_pow(1.0), Penalty::huber(0.03)}) {
    const BlurredPenalty bp{p};
    for (double t : {-0.3, -0.01, 0.0, 0.02, 0.5}) {
      const double fd = (bp.eval(t + 1e-6, 0.05) - bp.eval(t - 1e-6, 0.05)) / 2e-6;
      CHECK(bp.derivative(t, 0.05) == doctest::Approx(fd).epsilon(1e-6).scale(1e-3));
    }
  }
}

TEST_CASE("argmin scan") {
  CHECK(argmin_check({Penalty::abs_pow(1.0)}, 0.2));
  CHECK(argmin_check({Penalty::huber(1.0)}, 0.5));
  CHECK(argmin_check({Penalty::abs_pow(2.0)}, 1.0));
  CHECK_THROWS_AS(argmin_check({Penalty::abs_pow(2.0)}, 0.0), InvalidParam);
}

TEST_CASE("blurred curve differs from the penalty only near zero") {
  for (const Penalty& p : {Penalty::abs_pow(1.0), Penalty::huber(0.03)}) {
    const BlurredPenalty bp{p};
    for (int i = 0; i <= 400; ++i) {
      const double t = -1.0 + 2.0 * i / 400.0;
      if (std::abs(t) > 0.6) CHECK(std::abs(bp.eval(t, 0.2) - penalty_eval(p, t)) < 0.05);
    }
  }
}
