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

#ifndef FNSUP_SPECTRAL_STATS_HPP_
#define FNSUP_SPECTRAL_STATS_HPP_

#include <vector>

#include "fnsup/grid.hpp"
#include "fnsup/noise.hpp"

namespace fnsup {

/// Per-bin variance of one real component of F(n): (var a + var b)/2 at
/// ordinary bins, var a at self-conjugate bins (where b == 0 identically).
using VarianceMap = ImageGrid;

struct CoeffSampleSet {
  Bin bin;
  Eigen::Index U = 0;
  Eigen::Index V = 0;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

enum class Component { A, B };

struct GaussianityThresholds {
  double skew = 0.1;
  double kurt = 0.2;
  double ks_scale = 1.6;  // KS gate is ks_scale / sqrt(M)
};

struct GaussianityReport {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_statistic = 0.0;
  bool degenerate = false;
  bool pass = false;
};

struct CoeffGaussianity {
  GaussianityReport a;
  GaussianityReport b;
  bool pass() const { return a.pass && b.pass; }
};

struct IndependenceResult {
  double correlation = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// M realizations (realization m on seed.split(m)), each transformed once.
std::vector<CoeffSampleSet> monte_carlo_coeffs(const NoiseSpec& spec, Eigen::Index U,
                                               Eigen::Index V, const std::vector<Bin>& bins,
                                               int M, const RngSeed& seed);

/// k-statistic skewness and kurtosis, KS distance to N(mean, variance).
/// Samples with variance below 1e-30 are reported as degenerate and passing.
GaussianityReport gaussianity_test(const Eigen::VectorXd& samples,
                                   const GaussianityThresholds& th = {});
CoeffGaussianity gaussianity_test(const CoeffSampleSet& samples,
                                  const GaussianityThresholds& th = {});

/// Pearson correlation of paired samples; pass iff |corr| < 4/sqrt(M).
/// Throws ConjugatePairRejected for Hermitian partner bins.
IndependenceResult independence_test(const CoeffSampleSet& s1, Component c1,
                                     const CoeffSampleSet& s2, Component c2);

VarianceMap variance_map_empirical(const NoiseSpec& spec, Eigen::Index U, Eigen::Index V, int M,
                                   const RngSeed& seed);

/// |F^(h)|^2 sigma_eta^2 / (2UV), doubled at self-conjugate bins.
VarianceMap variance_map_theoretical(const ImageGrid& h, double inner_variance);

/// Closed-form map for any NoiseSpec (stationary, stripe, periodic,
/// independent-pixel families and mixtures thereof).
VarianceMap variance_map_analytic(const NoiseSpec& spec, Eigen::Index U, Eigen::Index V);

/// Smallest number of bins holding at least fraction p of the total mass.
int sparsity_index(const VarianceMap& map, double p);

}  // namespace fnsup

#endif  // FNSUP_SPECTRAL_STATS_HPP_
