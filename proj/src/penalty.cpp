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

#include "fnsup/penalty.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace fnsup {

Penalty Penalty::abs_pow(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw InvalidParam("abs_pow: q must be > 0");
  return {Kind::AbsPow, q};
}

Penalty Penalty::huber(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidParam("huber: delta must be > 0");
  return {Kind::Huber, delta};
}

std::string Penalty::describe() const {
  std::ostringstream os;
  os << (kind == Kind::AbsPow ? "abspow q=" : "huber delta=") << param;
  return os.str();
}

double penalty_eval(const Penalty& phi, double t) {
  const double a = std::abs(t);
  if (phi.kind == Penalty::Kind::AbsPow) return phi.param == 2.0 ? t * t : std::pow(a, phi.param);
  const double d = phi.param;
  return a <= d ? 0.5 * t * t : d * (a - 0.5 * d);
}

double penalty_grad(const Penalty& phi, double t) {
  if (phi.kind == Penalty::Kind::Huber) return std::clamp(t, -phi.param, phi.param);
  const double q = phi.param;
  if (t == 0.0) {
    if (q < 1.0) throw NonDifferentiable("|t|^q with q < 1 has no derivative at t = 0");
    return 0.0;
  }
  if (q == 2.0) return 2.0 * t;
  return q * std::pow(std::abs(t), q - 1.0) * (t > 0.0 ? 1.0 : -1.0);
}

std::vector<double> penalty_kinks(const Penalty& phi) {
  if (phi.kind == Penalty::Kind::AbsPow) return {0.0};
  return {-phi.param, phi.param};
}

GaussLegendre gauss_legendre(int order) {
  if (order < 1) throw InvalidParam("gauss_legendre: order must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(order); it != cache.end()) return it->second;

  // Golub-Welsch: eigenvalues of the Jacobi matrix, then Newton on P_n.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussLegendre gl{es.eigenvalues(), Eigen::VectorXd(order)};
  for (int i = 0; i < order; ++i) {
    double x = gl.nodes(i), dp = 1.0;
    for (int it = 0; it < 3; ++it) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= order; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      x -= p1 / dp;
    }
    gl.nodes(i) = x;
    gl.weights(i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  cache.emplace(order, gl);
  return gl;
}

namespace {

// Integrates g(tau) * N(tau; 0, sigma^2) over [-12 sigma, 12 sigma], with
// panel boundaries at the given breakpoints.
template <typename G>
double gaussian_expectation(G&& g, double sigma, std::vector<double> breaks, int order) {
  const double lo = -12.0 * sigma, hi = 12.0 * sigma;
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                              [&](double b) { return !(b > lo && b < hi); }),
               breaks.end());
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  const GaussLegendre gl = gauss_legendre(order);
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    if (b <= a) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / (2.0 * sigma))));
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = a + (p + 0.5) * w, r = 0.5 * w;
      for (int i = 0; i < gl.nodes.size(); ++i) {
        const double tau = c + r * gl.nodes(i);
        total += gl.weights(i) * r * g(tau) * std::exp(-0.5 * tau * tau / (sigma * sigma));
      }
    }
  }
  return total * norm;
}

std::vector<double> shifted_kinks(const Penalty& phi, double t) {
  std::vector<double> k = penalty_kinks(phi);
  for (double& x : k) x = t - x;  // phi(t - tau) kinks where t - tau = kink
  return k;
}

}  // namespace

double BlurredPenalty::eval(double t, double sigma) const {
  if (!(sigma >= 0.0)) throw InvalidParam("blurred penalty: sigma must be >= 0");
  if (sigma == 0.0) return penalty_eval(base, t);
  if (base.kind == Penalty::Kind::AbsPow && base.param == 2.0) return t * t + sigma * sigma;
  return gaussian_expectation([&](double tau) { return penalty_eval(base, t - tau); }, sigma,
                              shifted_kinks(base, t), order);
}

double BlurredPenalty::derivative(double t, double sigma) const {
  if (!(sigma >= 0.0)) throw InvalidParam("blurred penalty: sigma must be >= 0");
  if (sigma == 0.0) return penalty_grad(base, t);
  if (base.kind == Penalty::Kind::AbsPow && base.param == 2.0) return 2.0 * t;
  return gaussian_expectation(
      [&](double tau) {
        const double s = t - tau;
        return s == 0.0 ? 0.0 : penalty_grad(base, s);
      },
      sigma, shifted_kinks(base, t), order);
}

double blurred_penalty_eval(const BlurredPenalty& bp, double t, double sigma) {
  return bp.eval(t, sigma);
}

bool argmin_check(const BlurredPenalty& bp, double sigma) {
  if (!(sigma > 0.0)) throw InvalidParam("argmin_check: sigma must be > 0");
  constexpr int kPoints = 201;
  std::vector<double> t(kPoints), v(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    t[i] = -10.0 * sigma + 20.0 * sigma * i / (kPoints - 1);
    v[i] = bp.eval(t[i], sigma);
  }
  const int mid = kPoints / 2;
  for (int i = 0; i < mid; ++i) {
    if (!(v[i + 1] < v[i])) return false;
  }
  for (int i = mid; i + 1 < kPoints; ++i) {
    if (!(v[i + 1] > v[i])) return false;
  }
  return true;
}

}  // namespace fnsup
