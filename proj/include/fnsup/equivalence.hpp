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

#ifndef FNSUP_EQUIVALENCE_HPP_
#define FNSUP_EQUIVALENCE_HPP_

#include <optional>
#include <vector>

#include "fnsup/losses.hpp"
#include "fnsup/spectral_stats.hpp"

namespace fnsup {

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  int M = 0;
};

/// Average of the FourierFull loss between f and z + n_i over M draws
/// (draw i on seed.split(i)).
McEstimate mc_expected_loss(const ImageGrid& f, const ImageGrid& z, const NoiseSpec& spec,
                            const Penalty& phi, int M, const RngSeed& seed);

/// FourierFull loss with every coefficient penalty replaced by its blurred
/// version; sigma at bin (k,l) is sqrt(variance_map(k,l)) for the real part
/// and for the imaginary part (0 for the imaginary part at self-conjugate bins).
double blurred_fourier_loss(const ImageGrid& f, const ImageGrid& z, const VarianceMap& map,
                            const BlurredPenalty& bp);

struct EquivalenceGap {
  double gap = 0.0;
  double mc_mean = 0.0;
  double standard_error = 0.0;
  double blurred = 0.0;
  int M = 0;
};

/// |MC mean - blurred loss| / blurred loss. The map defaults to
/// variance_map_analytic(spec).
EquivalenceGap equivalence_gap(const ImageGrid& f, const ImageGrid& z, const NoiseSpec& spec,
                               const Penalty& phi, int M, const RngSeed& seed,
                               const std::optional<VarianceMap>& map = std::nullopt);

/// Fig.-style curve rows (t, phi, phi_blurred, phi_blurred') on n points over [lo, hi].
struct CurvePoint {
  double t, phi, blurred, derivative;
};
std::vector<CurvePoint> blurred_curve(const BlurredPenalty& bp, double sigma, double lo,
                                      double hi, int n);

}  // namespace fnsup

#endif  // FNSUP_EQUIVALENCE_HPP_
