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

#include <random>

#include "fnsup/losses.hpp"
#include "fnsup/models.hpp"

using namespace fnsup;

namespace {

ImageGrid random_grid(Eigen::Index U, Eigen::Index V, std::uint64_t seed, double scale) {
  auto eng = RngSeed{seed, 2}.engine();
  std::normal_distribution<double> d(0.0, scale);
  ImageGrid x(U, V);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = d(eng);
  return x;
}

// Literal double sum over bins using the direct-sum DFT oracle.
double literal_fourier_loss(const Penalty& phi, const ImageGrid& f, const ImageGrid& y, bool k0) {
  const Spectrum a = oracle::direct_dft(f), b = oracle::direct_dft(y);
  double s = 0.0;
  for (Eigen::Index k = 0; k < (k0 ? 1 : f.rows()); ++k) {
    for (Eigen::Index l = 0; l < f.cols(); ++l) {
      s += penalty_eval(phi, a(k, l).real() - b(k, l).real()) +
           penalty_eval(phi, a(k, l).imag() - b(k, l).imag());
    }
  }
  return s;
}

std::vector<LossSpec> all_specs() {
  return {LossSpec::fourier_full(Penalty::abs_pow(1.0)), LossSpec::fourier_full(Penalty::abs_pow(2.0)),
          LossSpec::fourier_full(Penalty::abs_pow(1.5)), LossSpec::fourier_full(Penalty::huber(0.03)),
          LossSpec::fourier_k0(Penalty::abs_pow(1.0)),   LossSpec::fourier_k0(Penalty::abs_pow(2.0)),
          LossSpec::fourier_k0(Penalty::huber(0.03)),    LossSpec::spatial_l2()};
}

}  // namespace

TEST_CASE("zero loss and zero gradient at f = y") {
  const ImageGrid y = random_grid(12, 10, 1, 1.0);
  for (const auto& spec : all_specs()) {
    CHECK(loss_eval(spec, y, y) == 0.0);
    CHECK(loss_grad(spec, y, y).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("loss values match the literal direct-sum definition") {
  const ImageGrid f = random_grid(9, 8, 2, 0.3), y = random_grid(9, 8, 3, 0.3);
  for (const auto& spec : all_specs()) {
    if (spec.kind == LossSpec::Kind::SpatialL2) continue;
    const double lit = literal_fourier_loss(spec.phi, f, y, spec.kind == LossSpec::Kind::FourierK0);
    CHECK(loss_eval(spec, f, y) == doctest::Approx(lit).epsilon(1e-10));
  }
}

TEST_CASE("Parseval: squared Fourier loss is the spatial L2 loss over UV") {
  const ImageGrid f = random_grid(16, 12, 4, 1.0), y = random_grid(16, 12, 5, 1.0);
  const LossSpec q2 = LossSpec::fourier_full(Penalty::abs_pow(2.0));
  const double l2 = loss_eval(LossSpec::spatial_l2(), f, y);
  CHECK(std::abs(loss_eval(q2, f, y) - l2 / 192.0) <= 1e-10 * l2 / 192.0);
  const ImageGrid g = loss_grad(q2, f, y);
  CHECK((g - 2.0 * (f - y) / 192.0).abs().maxCoeff() < 1e-10);
  CHECK((loss_grad(LossSpec::spatial_l2(), f, y) - 2.0 * (f - y)).abs().maxCoeff() == 0.0);
}

TEST_CASE("FourierK0 ignores column-balanced differences") {
  const ImageGrid f = random_grid(10, 14, 6, 1.0);
  ImageGrid d = random_grid(10, 14, 7, 1.0);
  d.rowwise() -= d.colwise().mean();
  const LossSpec k0 = LossSpec::fourier_k0(Penalty::huber(0.03));
  CHECK(loss_eval(k0, f, ImageGrid(f + d)) < 1e-12);
}

TEST_CASE("FourierK0 gradient is constant along u") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const ImageGrid f = random_grid(16, 16, 10 + s, 1.0), y = random_grid(16, 16, 20 + s, 1.0);
    const ImageGrid g = loss_grad(LossSpec::fourier_k0(Penalty::abs_pow(1.0)), f, y);
    CHECK((g.rowwise() - g.row(0)).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("loss gradients match central differences on 20 random 16x16 instances") {
  for (const auto& spec : all_specs()) {
    CAPTURE(spec.describe());
    double worst = 0.0;
    int used = 0;
    for (std::uint64_t trial = 0; used < 20; ++trial) {
      const ImageGrid y = random_grid(16, 16, 100 + trial, 1.0);
      const ImageGrid f = y + random_grid(16, 16, 200 + trial, 0.5);
      // Differences are only meaningful away from the kinks of phi.
      if (spec.kind != LossSpec::Kind::SpatialL2 &&
          oracle::kink_clearance(spec.phi, f, y, spec.kind == LossSpec::Kind::FourierK0) < 1e-4) {
        continue;
      }
      ++used;
      const ImageGrid g = loss_grad(spec, f, y);
      const ImageGrid fd = oracle::central_differences(
          [&](const ImageGrid& p) { return loss_eval(spec, p, y); }, f, 1e-5);
      worst = std::max(worst, oracle::max_rel_error(g.reshaped(), fd.reshaped(), 1e-3 * g.abs().maxCoeff()));
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("losses are non-negative") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const ImageGrid f = random_grid(8, 8, 30 + s, 1.0), y = random_grid(8, 8, 40 + s, 1.0);
    for (const auto& spec : all_specs()) CHECK(loss_eval(spec, f, y) > 0.0);
  }
}

TEST_CASE("shape mismatch") {
  CHECK_THROWS_AS(loss_eval(LossSpec::spatial_l2(), ImageGrid::Zero(4, 4), ImageGrid::Zero(4, 5)),
                  DimensionMismatch);
  CHECK_THROWS_AS(loss_grad(LossSpec::fourier_full(Penalty::huber()), ImageGrid::Zero(3, 4),
                            ImageGrid::Zero(4, 4)),
                  DimensionMismatch);
}

TEST_CASE("dataset loss is the sum of per-pair losses") {
  const LossSpec spec = LossSpec::fourier_full(Penalty::huber(0.03));
  SpectralDiagonalModel identity(16, 16);
  const ImageGrid y = random_grid(16, 16, 50, 1.0);
  // The identity gains reproduce y up to transform round-off.
  CHECK(dataset_loss(spec, {TrainingPair{y, y}}, identity) < 1e-28);

  const TrainingPair p{random_grid(16, 16, 51, 1.0), y};
  const double one = dataset_loss(spec, {p}, identity);
  CHECK(dataset_loss(spec, {p, p}, identity) == 2.0 * one);

  ConvNetModel net(ConvNetShape{2, 3, 4});
  net.init_uniform({3, 0});
  std::vector<TrainingPair> pairs;
  double manual = 0.0;
  for (std::uint64_t i = 0; i < 8; ++i) {
    const ImageGrid z = gen_clean({i, 0}, 16, 16, 3);
    DegradationSpec deg;
    deg.noise = IidGaussian{0.1};
    pairs.push_back(make_training_pair(z, deg, IidGaussian{0.1}, {i, 1}));
    manual += loss_eval(spec, net.forward(pairs.back().x), pairs.back().y);
  }
  CHECK(std::abs(dataset_loss(spec, pairs, net) - manual) <= 1e-12 * manual);
  CHECK_THROWS_AS(dataset_loss(spec, {}, net), InvalidParam);
}
