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

#include "fnsup/spectral_stats.hpp"

using namespace fnsup;

namespace {

double sample_var(const Eigen::VectorXd& x) {
  return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
}

std::vector<Bin> random_bins(Eigen::Index U, Eigen::Index V, int n, std::uint64_t seed) {
  auto eng = RngSeed{seed, 0}.engine();
  std::uniform_int_distribution<int> du(0, static_cast<int>(U) - 1), dv(0, static_cast<int>(V) - 1);
  std::vector<Bin> bins;
  while (static_cast<int>(bins.size()) < n) {
    const Bin b{du(eng), dv(eng)};
    if (b.k * b.l != 0) bins.push_back(b);
  }
  return bins;
}

double pass_rate(const NoiseSpec& spec, Eigen::Index U, Eigen::Index V, int M,
                 const std::vector<Bin>& bins) {
  const auto sets = monte_carlo_coeffs(spec, U, V, bins, M, {31, 0});
  int tested = 0, passed = 0;
  for (const auto& s : sets) {
    for (const auto& r : {gaussianity_test(s.a), gaussianity_test(s.b)}) {
      if (r.degenerate) continue;
      ++tested;
      passed += r.pass ? 1 : 0;
    }
  }
  return tested == 0 ? 0.0 : static_cast<double>(passed) / tested;
}

}  // namespace

TEST_CASE("coefficient variance of i.i.d. Gaussian noise") {
  const auto sets = monte_carlo_coeffs(IidGaussian{1.0}, 64, 64, {{5, 7}, {0, 0}}, 10000, {1, 0});
  const double expected = 1.0 / (2.0 * 64 * 64);
  CHECK(expected == doctest::Approx(1.2207e-4).epsilon(1e-4));
  CHECK(sample_var(sets[0].a) == doctest::Approx(expected).epsilon(0.10));
  CHECK(sample_var(sets[0].b) == doctest::Approx(expected).epsilon(0.10));
  CHECK((sets[1].b.array() == 0.0).all());
}

TEST_CASE("stripe noise leaves k != 0 bins untouched") {
  const auto sets = monte_carlo_coeffs(Stripe{1.0}, 32, 32, {{3, 5}}, 500, {2, 0});
  CHECK(sample_var(sets[0].a) < 1e-20);
  CHECK(sample_var(sets[0].b) < 1e-20);
}

TEST_CASE("bins out of range") {
  CHECK_THROWS_AS(monte_carlo_coeffs(IidGaussian{1.0}, 8, 8, {{8, 0}}, 100, {}), InvalidBin);
  CHECK_THROWS_AS(monte_carlo_coeffs(IidGaussian{1.0}, 8, 8, {{0, -1}}, 100, {}), InvalidBin);
}

TEST_CASE("uniform noise coefficients look Gaussian at 128x128") {
  const auto sets = monte_carlo_coeffs(IidUniform{1.0}, 128, 128, {{5, 7}}, 10000, {3, 0});
  const CoeffGaussianity g = gaussianity_test(sets[0]);
  CHECK(g.pass());
  CHECK(std::abs(g.a.skewness) < 0.08);
  CHECK(std::abs(g.a.excess_kurtosis) < 0.15);
  CHECK(g.a.ks_statistic < 1.6 / 100.0);
}

TEST_CASE("Gaussian noise passes everywhere") {
  const auto sets =
      monte_carlo_coeffs(IidGaussian{2.0}, 16, 24, {{1, 1}, {0, 5}, {8, 12}, {3, 20}}, 4000, {4, 0});
  for (const auto& s : sets) {
    const auto g = gaussianity_test(s);
    CHECK(g.pass());
  }
  CHECK(gaussianity_test(sets[2]).b.degenerate);  // (8,12) is self-conjugate
}

TEST_CASE("1x2 counterexample is triangular, not Gaussian") {
  const auto sets = monte_carlo_coeffs(IidUniform{1.0}, 1, 2, {{0, 1}}, 10000, {5, 0});
  const GaussianityReport r = gaussianity_test(sets[0].a);
  CHECK_FALSE(r.pass);
  // Triangular law (difference of two uniforms) has excess kurtosis -3/5.
  CHECK(r.excess_kurtosis == doctest::Approx(-0.6).epsilon(0.15));
  CHECK(gaussianity_test(sets[0].b).degenerate);
}

TEST_CASE("k-statistics against a brute-force evaluation") {
  Eigen::VectorXd x(7);
  x << 0.3, -1.2, 2.5, 0.0, 0.7, -0.4, 1.9;
  const GaussianityReport r = gaussianity_test(x);
  // Textbook unbiased estimators written out long-hand.
  const double n = 7.0, mean = x.mean();
  double m2 = 0, m3 = 0, m4 = 0;
  for (int i = 0; i < 7; ++i) {
    const double d = x(i) - mean;
    m2 += d * d / n;
    m3 += d * d * d / n;
    m4 += d * d * d * d / n;
  }
  const double G1 = std::sqrt(n * (n - 1)) / (n - 2) * m3 / std::pow(m2, 1.5);
  const double G2 = (n - 1) / ((n - 2) * (n - 3)) * ((n + 1) * (m4 / (m2 * m2) - 3) + 6);
  CHECK(r.skewness == doctest::Approx(G1).epsilon(1e-12));
  CHECK(r.excess_kurtosis == doctest::Approx(G2).epsilon(1e-12));
  CHECK(r.variance == doctest::Approx(m2 * n / (n - 1)).epsilon(1e-12));
}

TEST_CASE("independence between distinct bins") {
  const auto sets =
      monte_carlo_coeffs(IidGaussian{1.0}, 16, 16, {{1, 1}, {2, 3}, {0, 1}, {0, 15}}, 10000, {6, 0});
  const auto r = independence_test(sets[0], Component::A, sets[1], Component::A);
  CHECK(std::abs(r.correlation) < 0.04);
  CHECK(r.pass);
  const auto same = independence_test(sets[0], Component::A, sets[0], Component::B);
  CHECK(std::abs(same.correlation) < 4.0 / 100.0);
  CHECK_THROWS_AS(independence_test(sets[2], Component::A, sets[3], Component::A),
                  ConjugatePairRejected);
}

TEST_CASE("empirical variance map of white noise is flat") {
  const VarianceMap map = variance_map_empirical(IidGaussian{1.0}, 32, 32, 5000, {7, 0});
  for (int k = 1; k < 32; ++k) {
    for (int l = 1; l < 32; ++l) CHECK(map(k, l) == doctest::Approx(1.0 / 2048).epsilon(0.25));
  }
  const VarianceMap th = variance_map_theoretical(impulse_kernel(32, 32), 1.0);
  CHECK(th(3, 4) == doctest::Approx(1.0 / 2048));
  CHECK(th(0, 0) == doctest::Approx(2.0 / 2048));
  CHECK(th(16, 16) == doctest::Approx(2.0 / 2048));
}

TEST_CASE("other i.i.d. families follow the same law") {
  for (const NoiseSpec& spec : {NoiseSpec(IidUniform{0.8}), NoiseSpec(IidLaplace{0.3})}) {
    const VarianceMap map = variance_map_empirical(spec, 16, 16, 4000, {8, 0});
    const double expected = iid_variance(spec) / (2.0 * 256);
    for (int k = 1; k < 16; ++k) {
      for (int l = 1; l < 16; ++l) CHECK(map(k, l) == doctest::Approx(expected).epsilon(0.25));
    }
  }
}

TEST_CASE("independent-pixel families match the analytic map") {
  const ImageGrid z = gen_clean({3, 0}, 16, 16, 4);
  for (const NoiseSpec& spec :
       {NoiseSpec(HetGaussian{0.05, 0.001, z}), NoiseSpec(PoissonCentered{20.0, z})}) {
    const VarianceMap emp = variance_map_empirical(spec, 16, 16, 4000, {9, 0});
    const VarianceMap th = variance_map_analytic(spec, 16, 16);
    CHECK(oracle::max_rel_error(emp.reshaped(), th.reshaped(), 1e-30) < 0.25);
  }
}

TEST_CASE("stripe map sits on the k = 0 row") {
  const VarianceMap map = variance_map_empirical(Stripe{1.0}, 32, 32, 1000, {10, 0});
  CHECK(map.row(0).sum() >= 0.99 * map.sum());
  CHECK(sparsity_index(map, 0.99) <= 32);
  const VarianceMap th = variance_map_theoretical(column_kernel(32, 32), 32.0);
  CHECK(th.bottomRows(31).abs().maxCoeff() < 1e-20);
  CHECK(oracle::max_rel_error(map.row(0).transpose(), th.row(0).transpose(), 1e-30) < 0.25);
}

TEST_CASE("periodic map against a phase-averaged expansion") {
  const double s = 0.05;
  const VarianceMap map = variance_map_empirical(Periodic{{{0, 8, s}}}, 32, 32, 5000, {11, 0});
  // var of one component at (0,8): E[A^2] times the mean over phases of a^2
  // (resp. b^2) for a unit-amplitude cosine; averaging a trig polynomial of
  // degree 2 over 16 equispaced phases is exact.
  double a2 = 0.0, b2 = 0.0;
  for (int p = 0; p < 16; ++p) {
    const double phi = 2.0 * std::numbers::pi * p / 16.0;
    ImageGrid x(32, 32);
    for (int u = 0; u < 32; ++u)
      for (int v = 0; v < 32; ++v) x(u, v) = std::cos(2.0 * std::numbers::pi * 8 * v / 32.0 + phi);
    const auto F = oracle::direct_dft(x)(0, 8);
    a2 += F.real() * F.real() / 16.0;
    b2 += F.imag() * F.imag() / 16.0;
  }
  const double expected = s * s * 0.5 * (a2 + b2);
  CHECK(map(0, 8) == doctest::Approx(expected).epsilon(0.20));
  CHECK(map(0, 24) == doctest::Approx(expected).epsilon(0.20));
  CHECK(map(0, 8) + map(0, 24) >= (1.0 - 1e-12) * map.sum());
  const VarianceMap th = variance_map_analytic(Periodic{{{0, 8, s}}}, 32, 32);
  CHECK(th(0, 8) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("stationary map converges to the kernel formula") {
  const ImageGrid h = box_kernel(3, 32, 32);
  const NoiseSpec spec = make_stationary(h, IidGaussian{1.0});
  const VarianceMap th = variance_map_theoretical(h, 1.0);
  for (auto [M, tol] : {std::pair{2000, 0.15}, std::pair{10000, 0.07}}) {
    const VarianceMap emp = variance_map_empirical(spec, 32, 32, M, {12, 0});
    double worst = 0.0;
    for (Eigen::Index i = 0; i < th.size(); ++i) {
      if (th.data()[i] > 1e-8) {
        worst = std::max(worst, std::abs(emp.data()[i] - th.data()[i]) / th.data()[i]);
      }
    }
    CAPTURE(M);
    CHECK(worst < tol);
  }
  const VarianceMap col = variance_map_theoretical(column_kernel(32, 32), 1.0);
  CHECK(col.bottomRows(31).abs().maxCoeff() < 1e-20);
  CHECK(col.row(0).minCoeff() > 0.0);
}

TEST_CASE("sparsity index") {
  const VarianceMap flat = VarianceMap::Constant(7, 9, 0.3);
  CHECK(sparsity_index(flat, 0.5) == 32);  // ceil(63 / 2)
  VarianceMap one = VarianceMap::Zero(8, 8);
  one(2, 3) = 4.0;
  CHECK(sparsity_index(one, 0.99) == 1);
  CHECK_THROWS_AS(sparsity_index(one, 1.0), InvalidParam);
}

TEST_CASE("Gaussianity pass rate for the CLT families at 128x128") {
  const ImageGrid z = gen_clean({1, 0}, 128, 128, 20);
  const auto bins = random_bins(128, 128, 20, 4);
  const NoiseSpec families[] = {HetGaussian{0.01, 0.0005, z},
                                make_stationary(box_kernel(3, 128, 128), IidUniform{1.0})};
  for (const auto& spec : families) {
    CAPTURE(spec.family());
    CHECK(pass_rate(spec, 128, 128, 10000, bins) >= 0.95);
  }
  // Stripe support is the k = 0 row; everything else is degenerate.
  std::vector<Bin> row;
  for (int l = 1; l < 128; l += 7) row.push_back({0, l});
  CHECK(pass_rate(Stripe{0.1}, 128, 128, 10000, row) >= 0.95);
}

TEST_CASE("periodic coefficients are not asymptotically Gaussian") {
  // A random-amplitude sinusoid is not a sum of many independent pixels, so
  // the theorem does not apply; the test records the behaviour.
  const auto sets = monte_carlo_coeffs(Periodic{{{0, 8, 0.1}}}, 32, 32, {{0, 8}}, 10000, {13, 0});
  CHECK_FALSE(gaussianity_test(sets[0].a).pass);
}
