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

#include "fnsup/metrics.hpp"

#include <cmath>

#include "fnsup/losses.hpp"

namespace fnsup {

double psnr(const ImageGrid& a, const ImageGrid& b, double peak) {
  require_same_shape(a, b, "psnr");
  if (!(peak > 0.0)) throw InvalidParam("psnr: peak must be > 0");
  const double mse = (a - b).square().mean();
  if (mse < peak * peak * std::pow(10.0, -9.9)) return kPsnrCap;
  return 10.0 * std::log10(peak * peak / mse);
}

namespace {

Eigen::ArrayXd gaussian_window(int size, double sigma) {
  Eigen::ArrayXd w(size);
  const int r = size / 2;
  for (int i = 0; i < size; ++i) w(i) = std::exp(-0.5 * (i - r) * (i - r) / (sigma * sigma));
  return w / w.sum();
}

// Separable "valid" filtering with a normalized 1-D window.
ImageGrid filter_valid(const ImageGrid& x, const Eigen::ArrayXd& w) {
  const Eigen::Index n = w.size();
  const Eigen::Index U = x.rows() - n + 1, V = x.cols() - n + 1;
  ImageGrid rows = ImageGrid::Zero(x.rows(), V);
  for (Eigen::Index i = 0; i < n; ++i) rows += w(i) * x.middleCols(i, V);
  ImageGrid out = ImageGrid::Zero(U, V);
  for (Eigen::Index i = 0; i < n; ++i) out += w(i) * rows.middleRows(i, U);
  return out;
}

}  // namespace

double ssim(const ImageGrid& a, const ImageGrid& b, double dynamic_range) {
  require_same_shape(a, b, "ssim");
  const double c1 = std::pow(0.01 * dynamic_range, 2), c2 = std::pow(0.03 * dynamic_range, 2);
  constexpr int kWin = 11;
  if (a.rows() < kWin || a.cols() < kWin) {
    const double ma = a.mean(), mb = b.mean();
    const double va = (a - ma).square().mean(), vb = (b - mb).square().mean();
    const double cov = ((a - ma) * (b - mb)).mean();
    return ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  const Eigen::ArrayXd w = gaussian_window(kWin, 1.5);
  const ImageGrid ma = filter_valid(a, w), mb = filter_valid(b, w);
  const ImageGrid saa = filter_valid(a * a, w) - ma * ma;
  const ImageGrid sbb = filter_valid(b * b, w) - mb * mb;
  const ImageGrid sab = filter_valid(a * b, w) - ma * mb;
  const ImageGrid map = ((2.0 * ma * mb + c1) * (2.0 * sab + c2)) /
                        ((ma * ma + mb * mb + c1) * (saa + sbb + c2));
  return map.mean();
}

MetricsReport evaluate(const ImageGrid& estimate, const ImageGrid& reference, double peak) {
  return {psnr(estimate, reference, peak), ssim(estimate, reference, peak)};
}

double k0_energy(const ImageGrid& r) {
  const Eigen::ArrayXcd row = k0_row(r);
  return row.tail(row.size() - 1).abs2().sum();
}

double bin_energy(const ImageGrid& r, const std::vector<Bin>& bins) {
  const Spectrum F = dft_forward(r);
  double e = 0.0;
  for (const Bin& b : bins) e += std::norm(F(b.k, b.l));
  return e;
}

}  // namespace fnsup
