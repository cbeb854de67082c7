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

#include "fnsup/spectral_stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "fnsup/parallel.hpp"

namespace fnsup {

namespace {

void check_bin(Bin b, Eigen::Index U, Eigen::Index V) {
  if (b.k < 0 || b.l < 0 || b.k >= U || b.l >= V) {
    throw InvalidBin("bin (" + std::to_string(b.k) + "," + std::to_string(b.l) +
                     ") outside " + std::to_string(U) + "x" + std::to_string(V));
  }
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

// Running (count, mean, M2) per bin, combined in a fixed order.
struct Moments {
  double n = 0.0;
  ImageGrid mean_a, m2_a, mean_b, m2_b;

  Moments(Eigen::Index U, Eigen::Index V)
      : mean_a(ImageGrid::Zero(U, V)), m2_a(ImageGrid::Zero(U, V)),
        mean_b(ImageGrid::Zero(U, V)), m2_b(ImageGrid::Zero(U, V)) {}

  void add(const Spectrum& F) {
    n += 1.0;
    const ImageGrid a = F.real(), b = F.imag();
    ImageGrid d = a - mean_a;
    mean_a += d / n;
    m2_a += d * (a - mean_a);
    d = b - mean_b;
    mean_b += d / n;
    m2_b += d * (b - mean_b);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double tot = n + o.n;
    ImageGrid d = o.mean_a - mean_a;
    mean_a += d * (o.n / tot);
    m2_a += o.m2_a + d.square() * (n * o.n / tot);
    d = o.mean_b - mean_b;
    mean_b += d * (o.n / tot);
    m2_b += o.m2_b + d.square() * (n * o.n / tot);
    n = tot;
  }
};

constexpr int kBlock = 64;

}  // namespace

std::vector<CoeffSampleSet> monte_carlo_coeffs(const NoiseSpec& spec, Eigen::Index U,
                                               Eigen::Index V, const std::vector<Bin>& bins,
                                               int M, const RngSeed& seed) {
  if (M < 2) throw InvalidParam("monte_carlo_coeffs: M must be >= 2");
  for (const Bin& b : bins) check_bin(b, U, V);
  validate(spec, U, V);
  std::vector<CoeffSampleSet> out(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) {
    out[i].bin = bins[i];
    out[i].U = U;
    out[i].V = V;
    out[i].a.resize(M);
    out[i].b.resize(M);
  }
  parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) {
    const Spectrum F = dft_forward(sample_noise(spec, U, V, seed.split(m)));
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const auto c = F(bins[i].k, bins[i].l);
      out[i].a(static_cast<Eigen::Index>(m)) = c.real();
      out[i].b(static_cast<Eigen::Index>(m)) = c.imag();
    }
  });
  return out;
}

GaussianityReport gaussianity_test(const Eigen::VectorXd& x, const GaussianityThresholds& th) {
  const Eigen::Index M = x.size();
  if (M < 4) throw InvalidParam("gaussianity_test: need at least 4 samples");
  GaussianityReport r;
  const double n = static_cast<double>(M);
  r.mean = x.mean();
  const Eigen::ArrayXd d = x.array() - r.mean;
  const double s2 = d.square().sum(), s3 = d.cube().sum(), s4 = d.square().square().sum();
  const double m2 = s2 / n, m4 = s4 / n;
  const double k2 = s2 / (n - 1.0);
  r.variance = k2;
  if (k2 < 1e-30) {
    r.degenerate = true;
    r.pass = true;
    return r;
  }
  const double k3 = n * s3 / ((n - 1.0) * (n - 2.0));
  const double k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) /
                    ((n - 1.0) * (n - 2.0) * (n - 3.0));
  r.skewness = k3 / std::pow(k2, 1.5);
  r.excess_kurtosis = k4 / (k2 * k2);

  std::vector<double> sorted(x.data(), x.data() + M);
  std::sort(sorted.begin(), sorted.end());
  const double sd = std::sqrt(k2);
  double D = 0.0;
  for (Eigen::Index i = 0; i < M; ++i) {
    const double F = normal_cdf(sorted[i], r.mean, sd);
    D = std::max({D, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  r.ks_statistic = D;
  r.pass = std::abs(r.skewness) <= th.skew && std::abs(r.excess_kurtosis) <= th.kurt &&
           D <= th.ks_scale / std::sqrt(n);
  return r;
}

CoeffGaussianity gaussianity_test(const CoeffSampleSet& s, const GaussianityThresholds& th) {
  return {gaussianity_test(s.a, th), gaussianity_test(s.b, th)};
}

IndependenceResult independence_test(const CoeffSampleSet& s1, Component c1,
                                     const CoeffSampleSet& s2, Component c2) {
  if (s1.U != s2.U || s1.V != s2.V || s1.a.size() != s2.a.size()) {
    throw DimensionMismatch("independence_test: sample sets are not paired");
  }
  if (conjugate_bin(s1.bin, s1.U, s1.V) == s2.bin) {
    throw ConjugatePairRejected("bins (" + std::to_string(s1.bin.k) + "," +
                                std::to_string(s1.bin.l) + ") and (" + std::to_string(s2.bin.k) +
                                "," + std::to_string(s2.bin.l) + ") are Hermitian partners");
  }
  const Eigen::VectorXd& x = c1 == Component::A ? s1.a : s1.b;
  const Eigen::VectorXd& y = c2 == Component::A ? s2.a : s2.b;
  const Eigen::ArrayXd dx = x.array() - x.mean(), dy = y.array() - y.mean();
  const double sxx = dx.square().sum(), syy = dy.square().sum();
  IndependenceResult r;
  r.threshold = 4.0 / std::sqrt(static_cast<double>(x.size()));
  r.correlation = (sxx > 0.0 && syy > 0.0) ? (dx * dy).sum() / std::sqrt(sxx * syy) : 0.0;
  r.pass = std::abs(r.correlation) < r.threshold;
  return r;
}

VarianceMap variance_map_empirical(const NoiseSpec& spec, Eigen::Index U, Eigen::Index V, int M,
                                   const RngSeed& seed) {
  if (M < 2) throw InvalidParam("variance_map_empirical: M must be >= 2");
  validate(spec, U, V);
  const int blocks = (M + kBlock - 1) / kBlock;
  std::vector<Moments> partial(static_cast<std::size_t>(blocks), Moments(U, V));
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t blk) {
    const int lo = static_cast<int>(blk) * kBlock, hi = std::min(M, lo + kBlock);
    for (int m = lo; m < hi; ++m) {
      partial[blk].add(dft_forward(sample_noise(spec, U, V, seed.split(static_cast<std::uint64_t>(m)))));
    }
  });
  Moments total(U, V);
  for (const auto& p : partial) total.merge(p);
  const double dof = total.n - 1.0;
  VarianceMap map(U, V);
  for (Eigen::Index k = 0; k < U; ++k) {
    for (Eigen::Index l = 0; l < V; ++l) {
      const Bin b{static_cast<int>(k), static_cast<int>(l)};
      map(k, l) = is_self_conjugate(b, U, V) ? total.m2_a(k, l) / dof
                                             : 0.5 * (total.m2_a(k, l) + total.m2_b(k, l)) / dof;
    }
  }
  return map;
}

VarianceMap variance_map_theoretical(const ImageGrid& h, double inner_variance) {
  require_valid(h, "variance_map_theoretical");
  const Eigen::Index U = h.rows(), V = h.cols();
  VarianceMap map = kernel_transform(h).abs2() * (inner_variance / (2.0 * static_cast<double>(U * V)));
  for (Eigen::Index k = 0; k < U; ++k) {
    for (Eigen::Index l = 0; l < V; ++l) {
      if (is_self_conjugate({static_cast<int>(k), static_cast<int>(l)}, U, V)) map(k, l) *= 2.0;
    }
  }
  return map;
}

namespace {

// Independent pixels with variances v: sum(v)/(2 (UV)^2), doubled at
// self-conjugate bins.
VarianceMap independent_pixel_map(const ImageGrid& v) {
  const Eigen::Index U = v.rows(), V = v.cols();
  const double n = static_cast<double>(U * V);
  ImageGrid h = impulse_kernel(U, V);
  return variance_map_theoretical(h, v.sum() / n);
}

}  // namespace

VarianceMap variance_map_analytic(const NoiseSpec& spec, Eigen::Index U, Eigen::Index V) {
  validate(spec, U, V);
  if (spec.is_iid()) return variance_map_theoretical(impulse_kernel(U, V), iid_variance(spec));
  if (auto p = spec.as<PoissonCentered>()) return independent_pixel_map(p->reference / p->peak);
  if (auto h = spec.as<HetGaussian>()) {
    return independent_pixel_map(h->alpha * h->reference + h->beta);
  }
  if (auto s = spec.as<Stationary>()) return variance_map_theoretical(s->kernel, iid_variance(*s->inner));
  if (auto s = spec.as<Stripe>()) {
    // A column stripe is a column kernel applied to i.i.d. noise of variance U sigma^2.
    if (s->axis == StripeAxis::Column) {
      return variance_map_theoretical(column_kernel(U, V), s->sigma * s->sigma * static_cast<double>(U));
    }
    ImageGrid h = ImageGrid::Zero(U, V);
    h.row(0).setConstant(1.0 / static_cast<double>(V));
    return variance_map_theoretical(h, s->sigma * s->sigma * static_cast<double>(V));
  }
  if (auto p = spec.as<Periodic>()) {
    VarianceMap map = VarianceMap::Zero(U, V);
    for (const auto& c : p->components) {
      const Bin b{static_cast<int>(((c.k0 % U) + U) % U), static_cast<int>(((c.l0 % V) + V) % V)};
      const double s2 = c.sigma_amp * c.sigma_amp;
      if (is_self_conjugate(b, U, V)) {
        map(b.k, b.l) += s2 / 2.0;
      } else {
        const Bin cb = conjugate_bin(b, U, V);
        map(b.k, b.l) += s2 / 8.0;
        map(cb.k, cb.l) += s2 / 8.0;
      }
    }
    return map;
  }
  const auto& m = std::get<Mixture>(spec.v);
  VarianceMap map = VarianceMap::Zero(U, V);
  for (const auto& part : m.parts) map += variance_map_analytic(part, U, V);
  return map;
}

int sparsity_index(const VarianceMap& map, double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParam("sparsity_index: p must lie in (0,1)");
  std::vector<double> v(map.data(), map.data() + map.size());
  std::sort(v.begin(), v.end(), std::greater<>());
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total <= 0.0) return 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc += v[i];
    if (acc >= p * total * (1.0 - 1e-12)) return static_cast<int>(i + 1);
  }
  return static_cast<int>(v.size());
}

}  // namespace fnsup
