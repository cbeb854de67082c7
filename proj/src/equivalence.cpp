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

#include "fnsup/equivalence.hpp"

#include <cmath>

#include "fnsup/parallel.hpp"

namespace fnsup {

McEstimate mc_expected_loss(const ImageGrid& f, const ImageGrid& z, const NoiseSpec& spec,
                            const Penalty& phi, int M, const RngSeed& seed) {
  require_same_shape(f, z, "mc_expected_loss");
  if (M < 2) throw InvalidParam("mc_expected_loss: M must be >= 2");
  const LossSpec loss = LossSpec::fourier_full(phi);
  const auto vals = parallel_map<double>(static_cast<std::size_t>(M), [&](std::size_t i) {
    const ImageGrid y = z + sample_noise(spec, z.rows(), z.cols(), seed.split(i));
    return loss_eval(loss, f, y);
  });
  // Shifted by the first draw, so that identical draws give an exact mean and zero error.
  const double ref = vals.front();
  double shift = 0.0;
  for (double v : vals) shift += v - ref;
  shift /= M;
  double ss = 0.0;
  for (double v : vals) ss += (v - ref - shift) * (v - ref - shift);
  return {ref + shift, std::sqrt(ss / (M - 1.0) / M), M};
}

double blurred_fourier_loss(const ImageGrid& f, const ImageGrid& z, const VarianceMap& map,
                            const BlurredPenalty& bp) {
  require_same_shape(f, z, "blurred_fourier_loss");
  require_same_shape(f, map, "blurred_fourier_loss map");
  const Eigen::Index U = f.rows(), V = f.cols();
  const Spectrum d = dft_forward(f) - dft_forward(z);
  ImageGrid per_bin(U, V);
  parallel_for(static_cast<std::size_t>(U), [&](std::size_t k) {
    for (Eigen::Index l = 0; l < V; ++l) {
      const double sigma = std::sqrt(std::max(0.0, map(k, l)));
      const bool sc = is_self_conjugate({static_cast<int>(k), static_cast<int>(l)}, U, V);
      per_bin(k, l) = bp.eval(d(k, l).real(), sigma) + bp.eval(d(k, l).imag(), sc ? 0.0 : sigma);
    }
  });
  // Same summation order as loss_eval so that sigma == 0 reproduces it bit for bit.
  double total = 0.0;
  for (Eigen::Index i = 0; i < per_bin.size(); ++i) total += per_bin.data()[i];
  return total;
}

EquivalenceGap equivalence_gap(const ImageGrid& f, const ImageGrid& z, const NoiseSpec& spec,
                               const Penalty& phi, int M, const RngSeed& seed,
                               const std::optional<VarianceMap>& map) {
  const VarianceMap m = map ? *map : variance_map_analytic(spec, z.rows(), z.cols());
  const McEstimate mc = mc_expected_loss(f, z, spec, phi, M, seed);
  EquivalenceGap g;
  g.mc_mean = mc.mean;
  g.standard_error = mc.standard_error;
  g.M = M;
  g.blurred = blurred_fourier_loss(f, z, m, BlurredPenalty{phi});
  const double diff = std::abs(g.mc_mean - g.blurred);
  g.gap = diff == 0.0 ? 0.0 : diff / g.blurred;
  return g;
}

std::vector<CurvePoint> blurred_curve(const BlurredPenalty& bp, double sigma, double lo,
                                      double hi, int n) {
  if (n < 2 || !(hi > lo)) throw InvalidParam("blurred_curve: need n >= 2 and hi > lo");
  std::vector<CurvePoint> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * i / (n - 1);
    out[i] = {t, penalty_eval(bp.base, t), bp.eval(t, sigma), bp.derivative(t, sigma)};
  }
  return out;
}

}  // namespace fnsup
