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

#include "fnsup/losses.hpp"

#include <cmath>

namespace fnsup {

std::string LossSpec::describe() const {
  switch (kind) {
    case Kind::FourierFull:
      return "fourier_full " + phi.describe();
    case Kind::FourierK0:
      return "fourier_k0 " + phi.describe();
    case Kind::SpatialL2:
      break;
  }
  return "spatial_l2";
}

Eigen::ArrayXcd k0_row(const ImageGrid& x) {
  const Eigen::Index U = x.rows(), V = x.cols();
  const Eigen::ArrayXd colsum = x.colwise().sum().transpose();
  std::vector<std::complex<double>> in(colsum.data(), colsum.data() + V), out(V);
  if (V > 1) detail::thread_fft<double>().fwd(out.data(), in.data(), V);
  else out = in;
  Eigen::ArrayXcd row = Eigen::Map<Eigen::ArrayXcd>(out.data(), V) / static_cast<double>(U * V);
  // Same Hermitian projection as dft_forward, restricted to the k = 0 row.
  for (Eigen::Index l = 0; l < V; ++l) {
    const Eigen::Index lc = (V - l) % V;
    if (lc < l) continue;
    const std::complex<double> avg = 0.5 * (row(l) + std::conj(row(lc)));
    row(l) = avg;
    row(lc) = std::conj(avg);
  }
  return row;
}

namespace {

template <typename A>
double penalty_sum(const Penalty& phi, const A& d) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    s += penalty_eval(phi, d.data()[i].real()) + penalty_eval(phi, d.data()[i].imag());
  }
  return s;
}

}  // namespace

double loss_eval(const LossSpec& spec, const ImageGrid& f, const ImageGrid& y) {
  require_same_shape(f, y, "loss_eval");
  switch (spec.kind) {
    case LossSpec::Kind::SpatialL2:
      return (f - y).square().sum();
    case LossSpec::Kind::FourierK0:
      return penalty_sum(spec.phi, Eigen::ArrayXcd(k0_row(f) - k0_row(y)));
    case LossSpec::Kind::FourierFull:
      break;
  }
  return penalty_sum(spec.phi, Spectrum(dft_forward(f) - dft_forward(y)));
}

ImageGrid loss_grad(const LossSpec& spec, const ImageGrid& f, const ImageGrid& y) {
  require_same_shape(f, y, "loss_grad");
  const Eigen::Index U = f.rows(), V = f.cols();
  const double inv = 1.0 / static_cast<double>(U * V);
  auto g = [&](std::complex<double> d) {
    return std::complex<double>(penalty_grad(spec.phi, d.real()), penalty_grad(spec.phi, d.imag()));
  };
  switch (spec.kind) {
    case LossSpec::Kind::SpatialL2:
      return 2.0 * (f - y);
    case LossSpec::Kind::FourierK0: {
      const Eigen::ArrayXcd d = k0_row(f) - k0_row(y);
      std::vector<std::complex<double>> G(V), out(V);
      for (Eigen::Index l = 0; l < V; ++l) G[l] = g(d(l));
      if (V > 1) detail::thread_fft<double>().inv(out.data(), G.data(), V);
      else out = G;
      ImageGrid grad(U, V);
      for (Eigen::Index v = 0; v < V; ++v) grad.col(v).setConstant(out[v].real() * inv);
      return grad;
    }
    case LossSpec::Kind::FourierFull:
      break;
  }
  const Spectrum d = dft_forward(f) - dft_forward(y);
  Spectrum G(U, V);
  for (Eigen::Index i = 0; i < d.size(); ++i) G.data()[i] = g(d.data()[i]);
  return dft_synthesize(G).real() * inv;
}

}  // namespace fnsup
