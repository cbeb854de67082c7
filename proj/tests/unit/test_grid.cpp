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

#include "fnsup/grid.hpp"
#include "fnsup/rng.hpp"

using namespace fnsup;

namespace {

ImageGrid random_grid(Eigen::Index U, Eigen::Index V, std::uint64_t seed) {
  auto eng = RngSeed{seed, 1}.engine();
  std::normal_distribution<double> d;
  ImageGrid x(U, V);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = d(eng);
  return x;
}

double max_abs(const Spectrum& a, const Spectrum& b) { return (a - b).abs().maxCoeff(); }

}  // namespace

TEST_CASE("constant image has only a DC term") {
  const Spectrum F = dft_forward(ImageGrid::Constant(4, 4, 3.0));
  CHECK(F(0, 0).real() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(F(0, 0).imag() == 0.0);
  Spectrum rest = F;
  rest(0, 0) = 0.0;
  CHECK(rest.abs().maxCoeff() < 1e-15);
}

TEST_CASE("impulse spreads evenly") {
  const Spectrum F = dft_forward(impulse_kernel(4, 4));
  CHECK((F - std::complex<double>(0.0625, 0.0)).abs().maxCoeff() < 1e-16);
}

TEST_CASE("cosine along u lands on (1,0) and (7,0)") {
  ImageGrid x(8, 8);
  for (int u = 0; u < 8; ++u) x.row(u).setConstant(std::cos(2.0 * std::numbers::pi * u / 8.0));
  Spectrum expect = Spectrum::Zero(8, 8);
  expect(1, 0) = expect(7, 0) = 0.5;
  CHECK(max_abs(dft_forward(x), expect) < 1e-12);
}

TEST_CASE("fast transform matches the direct sum up to 32x32") {
  const std::pair<int, int> shapes[] = {{1, 1}, {1, 2}, {2, 1}, {3, 5}, {4, 4}, {7, 6},
                                        {8, 8}, {15, 16}, {16, 9}, {32, 32}, {31, 17}};
  std::uint64_t seed = 10;
  for (auto [U, V] : shapes) {
    CAPTURE(U);
    CAPTURE(V);
    const ImageGrid x = random_grid(U, V, seed++);
    CHECK(max_abs(dft_forward(x), oracle::direct_dft(x)) < 1e-10);
  }
}

TEST_CASE("Hermitian symmetry and imag[0,0] == 0") {
  for (auto [U, V] : {std::pair{8, 8}, std::pair{7, 9}, std::pair{6, 5}}) {
    const Spectrum F = dft_forward(random_grid(U, V, 3));
    CHECK(F(0, 0).imag() == 0.0);
    for (int k = 0; k < U; ++k) {
      for (int l = 0; l < V; ++l) {
        const Bin c = conjugate_bin({k, l}, U, V);
        CHECK(std::abs(F(k, l).real() - F(c.k, c.l).real()) <= 1e-10);
        CHECK(std::abs(F(k, l).imag() + F(c.k, c.l).imag()) <= 1e-10);
        if (is_self_conjugate({k, l}, U, V)) CHECK(F(k, l).imag() == 0.0);
      }
    }
  }
}

TEST_CASE("Parseval and linearity") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const ImageGrid x = random_grid(12, 10, s), y = random_grid(12, 10, s + 100);
    const Spectrum F = dft_forward(x);
    const double lhs = F.abs2().sum(), rhs = x.square().sum() / 120.0;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);
    const Spectrum L = dft_forward(ImageGrid(2.5 * x - 0.75 * y));
    CHECK(max_abs(L, Spectrum(2.5 * F - 0.75 * dft_forward(y))) < 1e-12);
  }
}

TEST_CASE("inverse round trip and error path") {
  const ImageGrid x = random_grid(16, 16, 7);
  const ImageGrid back = dft_inverse(dft_forward(x));
  CHECK(((back - x).abs() / x.abs().maxCoeff()).maxCoeff() < 1e-12);

  Spectrum dc = Spectrum::Zero(5, 6);
  dc(0, 0) = 2.5;
  CHECK((dft_inverse(dc) - 2.5).abs().maxCoeff() < 1e-15);

  Spectrum bad = Spectrum::Zero(8, 8);
  bad(1, 2) = 1.0;  // partner (7,6) left at zero
  CHECK_THROWS_AS(dft_inverse(bad), HermitianViolation);
}

TEST_CASE("kernel transform examples") {
  CHECK((kernel_transform(impulse_kernel(6, 6)) - std::complex<double>(1.0)).abs().maxCoeff() < 1e-14);

  const Spectrum H = kernel_transform(column_kernel(8, 8));
  for (int k = 0; k < 8; ++k) {
    for (int l = 0; l < 8; ++l) {
      CHECK(std::abs(H(k, l) - std::complex<double>(k == 0 ? 1.0 : 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("convolution theorem with a 3x3 box on random noise") {
  const ImageGrid h = box_kernel(3, 12, 10);
  const ImageGrid eta = random_grid(12, 10, 42);
  const ImageGrid conv = oracle::direct_circular_convolve(h, eta);
  CHECK((circular_convolve(h, eta) - conv).abs().maxCoeff() < 1e-12);
  const Spectrum lhs = dft_forward(conv);
  const Spectrum rhs = kernel_transform(h) * dft_forward(eta);
  CHECK(max_abs(lhs, rhs) < 1e-10);
}

TEST_CASE("wrap_kernel validation") {
  CHECK_THROWS_AS(wrap_kernel(ImageGrid::Ones(2, 3), 8, 8), InvalidParam);
  CHECK_THROWS_AS(wrap_kernel(ImageGrid::Ones(9, 3), 8, 8), DimensionMismatch);
  const ImageGrid h = box_kernel(3, 8, 8);
  CHECK(h.sum() == doctest::Approx(1.0));
  CHECK(h(7, 7) == doctest::Approx(1.0 / 9.0));
}
