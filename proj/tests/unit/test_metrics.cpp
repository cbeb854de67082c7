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

#include <cmath>
#include <numbers>

#include "fnsup/metrics.hpp"
#include "fnsup/noise.hpp"

using namespace fnsup;

namespace {

// SSIM by explicit 2-D windows, no separability.
double ssim_direct(const ImageGrid& a, const ImageGrid& b, double L) {
  const int n = 11, r = 5;
  Eigen::ArrayXXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = std::exp(-((i - r) * (i - r) + (j - r) * (j - r)) / 4.5);
  w /= w.sum();
  const double c1 = (0.01 * L) * (0.01 * L), c2 = (0.03 * L) * (0.03 * L);
  double total = 0.0;
  int count = 0;
  for (Eigen::Index u = 0; u + n <= a.rows(); ++u) {
    for (Eigen::Index v = 0; v + n <= a.cols(); ++v) {
      const Eigen::ArrayXXd pa = a.block(u, v, n, n), pb = b.block(u, v, n, n);
      const double ma = (w * pa).sum(), mb = (w * pb).sum();
      const double va = (w * pa * pa).sum() - ma * ma, vb = (w * pb * pb).sum() - mb * mb;
      const double cov = (w * pa * pb).sum() - ma * mb;
      total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return total / count;
}

}  // namespace

TEST_CASE("identical images hit the PSNR cap and SSIM 1") {
  const ImageGrid z = gen_clean({1, 0}, 32, 32, 10);
  CHECK(psnr(z, z) == kPsnrCap);
  CHECK(ssim(z, z) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("PSNR formula") {
  ImageGrid a = ImageGrid::Constant(8, 8, 100.0), b = a + 1.0;
  CHECK(psnr(a, b, 255.0) == doctest::Approx(48.1308).epsilon(1e-6));
  b = a + 2.0;
  CHECK(psnr(a, b, 255.0) == doctest::Approx(10 * std::log10(255.0 * 255.0 / 4.0)));
  CHECK_THROWS_AS(psnr(a, ImageGrid::Zero(8, 7)), DimensionMismatch);
  CHECK_THROWS_AS(psnr(a, b, 0.0), InvalidParam);
}

TEST_CASE("SSIM of constant images reduces to the luminance term") {
  const ImageGrid a = ImageGrid::Constant(16, 16, 100.0), b = ImageGrid::Constant(16, 16, 150.0);
  const double expect = (2 * 100.0 * 150.0 + 6.5025) / (100.0 * 100.0 + 150.0 * 150.0 + 6.5025);
  CHECK(ssim(a, b, 255.0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(0.9231).epsilon(1e-4));
}

TEST_CASE("SSIM matches a direct windowed evaluation") {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const ImageGrid a = gen_clean({s, 0}, 24, 20, 8);
    const ImageGrid b = a + sample_noise(IidGaussian{0.05 * (s + 1)}, 24, 20, {s, 1});
    const double got = ssim(a, b);
    CHECK(got == doctest::Approx(ssim_direct(a, b, 1.0)).epsilon(1e-12));
    CHECK(got == doctest::Approx(ssim(b, a)).epsilon(1e-12));
    CHECK(got < 1.0);
  }
}

TEST_CASE("k0 energy of a column stripe is its variance across columns") {
  const ImageGrid n = sample_noise(Stripe{0.3}, 16, 24, {4, 0});
  const Eigen::ArrayXd s = n.row(0).transpose();
  const double expect = s.square().mean() - s.mean() * s.mean();
  CHECK(k0_energy(n) == doctest::Approx(expect).epsilon(1e-12));
  // White noise spreads energy, only about a 1/U share lands on k = 0.
  const ImageGrid w = sample_noise(IidGaussian{1.0}, 32, 32, {5, 0});
  CHECK(k0_energy(w) < 0.1 * w.square().mean());
}

TEST_CASE("bin energy of a cosine") {
  ImageGrid c(32, 32);
  for (Eigen::Index u = 0; u < 32; ++u)
    for (Eigen::Index v = 0; v < 32; ++v) c(u, v) = 0.7 * std::cos(2 * std::numbers::pi * 8 * v / 32.0);
  CHECK(bin_energy(c, {{0, 8}, {0, 24}}) == doctest::Approx(0.7 * 0.7 / 2).epsilon(1e-12));
  CHECK(bin_energy(c, {{1, 8}}) < 1e-28);
}
