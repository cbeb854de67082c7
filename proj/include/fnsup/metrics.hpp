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

#ifndef FNSUP_METRICS_HPP_
#define FNSUP_METRICS_HPP_

#include <vector>

#include "fnsup/grid.hpp"

namespace fnsup {

struct MetricsReport {
  double psnr = 0.0;
  double ssim = 0.0;
};

inline constexpr double kPsnrCap = 99.0;

/// 10 log10(peak^2 / MSE), capped at 99 dB.
double psnr(const ImageGrid& a, const ImageGrid& b, double peak = 1.0);

/// Mean SSIM over 11x11 Gaussian windows (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// evaluated where the window fits inside the image (whole image if smaller).
double ssim(const ImageGrid& a, const ImageGrid& b, double dynamic_range = 1.0);

MetricsReport evaluate(const ImageGrid& estimate, const ImageGrid& reference, double peak = 1.0);

/// Energy of the k = 0 row of dft_forward(r) excluding DC.
double k0_energy(const ImageGrid& r);

/// Sum of |dft_forward(r)[k,l]|^2 over the listed bins.
double bin_energy(const ImageGrid& r, const std::vector<Bin>& bins);

}  // namespace fnsup

#endif  // FNSUP_METRICS_HPP_
