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

#ifndef FNSUP_GRID_HPP_
#define FNSUP_GRID_HPP_

#include <complex>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "fnsup/errors.hpp"

namespace fnsup {

/// Row-major U x V raster. Rows index u (height), columns index v (width).
template <typename Scalar>
using Image = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Full (redundant) U x V complex spectrum. real() holds a(.), imag() b(.).
template <typename Scalar>
using SpectrumOf =
    Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ImageGrid = Image<double>;
using Spectrum = SpectrumOf<double>;

struct Bin {
  int k = 0;
  int l = 0;
  friend bool operator==(const Bin&, const Bin&) = default;
};

inline Bin conjugate_bin(Bin b, Eigen::Index rows, Eigen::Index cols) {
  const int U = static_cast<int>(rows), V = static_cast<int>(cols);
  return {(U - b.k) % U, (V - b.l) % V};
}

/// True where the bin is its own Hermitian partner, i.e. b == 0 identically
/// for every real input: (0,0) and the Nyquist rows/columns on even sizes.
inline bool is_self_conjugate(Bin b, Eigen::Index rows, Eigen::Index cols) {
  return conjugate_bin(b, rows, cols) == b;
}

void require_valid(const ImageGrid& x, const char* what);
void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* what);

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& thread_fft() {
  thread_local Eigen::FFT<Scalar> fft = [] {
    Eigen::FFT<Scalar> f;
    f.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    return f;
  }();
  return fft;
}

// Unnormalized 2-D transform in place. sign < 0: e^{-j...}, sign > 0: e^{+j...}.
template <typename Scalar>
void fft2_inplace(SpectrumOf<Scalar>& z, int sign) {
  using C = std::complex<Scalar>;
  auto& fft = thread_fft<Scalar>();
  const Eigen::Index U = z.rows(), V = z.cols();
  std::vector<C> in(static_cast<std::size_t>(std::max(U, V)));
  std::vector<C> out(in.size());
  // Length-1 transforms are the identity (and the backend does not accept them).
  for (Eigen::Index u = 0; V > 1 && u < U; ++u) {
    C* row = z.data() + u * V;
    std::copy(row, row + V, in.begin());
    if (sign < 0) fft.fwd(out.data(), in.data(), V);
    else fft.inv(out.data(), in.data(), V);
    std::copy(out.begin(), out.begin() + V, row);
  }
  for (Eigen::Index v = 0; U > 1 && v < V; ++v) {
    for (Eigen::Index u = 0; u < U; ++u) in[u] = z(u, v);
    if (sign < 0) fft.fwd(out.data(), in.data(), U);
    else fft.inv(out.data(), in.data(), U);
    for (Eigen::Index u = 0; u < U; ++u) z(u, v) = out[u];
  }
}

}  // namespace detail

/// Projects a spectrum onto the Hermitian subspace: F <- (F + conj(F[-k,-l]))/2.
/// Self-conjugate bins come out purely real.
template <typename Scalar>
void hermitian_project(SpectrumOf<Scalar>& F) {
  const Eigen::Index U = F.rows(), V = F.cols();
  for (Eigen::Index k = 0; k < U; ++k) {
    const Eigen::Index kc = (U - k) % U;
    if (kc < k) continue;
    for (Eigen::Index l = 0; l < V; ++l) {
      const Eigen::Index lc = (V - l) % V;
      if (kc == k && lc < l) continue;
      const std::complex<Scalar> avg = Scalar(0.5) * (F(k, l) + std::conj(F(kc, lc)));
      F(k, l) = avg;
      F(kc, lc) = std::conj(avg);
    }
  }
}

/// F[k,l] = (1/UV) sum_{u,v} x[u,v] e^{-j2pi(ku/U + lv/V)}.
///
/// Computed by a fast transform and then projected onto the Hermitian
/// subspace, so conjugate symmetry holds exactly and b is exactly zero at the
/// self-conjugate bins (in particular imag[0,0] == 0).
template <typename Derived>
SpectrumOf<typename Derived::Scalar> dft_forward(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  SpectrumOf<Scalar> F = x.template cast<std::complex<Scalar>>();
  detail::fft2_inplace(F, -1);
  F /= Scalar(x.rows() * x.cols());
  hermitian_project(F);
  return F;
}

/// Unnormalized synthesis sum_{k,l} F[k,l] e^{+j2pi(ku/U + lv/V)}, complex
/// result. Used by adjoints where the input spectrum need not be Hermitian.
template <typename Scalar>
SpectrumOf<Scalar> dft_synthesize(const SpectrumOf<Scalar>& F) {
  SpectrumOf<Scalar> z = F;
  detail::fft2_inplace(z, +1);
  return z;
}

inline constexpr double kHermitianTolerance = 1e-6;

/// Inverse of dft_forward: x[u,v] = sum_{k,l} F[k,l] e^{+j2pi(ku/U + lv/V)}.
/// Throws HermitianViolation if the synthesized image has an imaginary part
/// above 1e-6 anywhere.
template <typename Scalar>
Image<Scalar> dft_inverse(const SpectrumOf<Scalar>& F) {
  const SpectrumOf<Scalar> z = dft_synthesize(F);
  const Scalar worst = z.imag().abs().maxCoeff();
  if (!(worst <= Scalar(kHermitianTolerance))) {
    throw HermitianViolation("dft_inverse: imaginary residue " + std::to_string(worst) +
                             " exceeds tolerance; spectrum is not Hermitian");
  }
  return z.real();
}

/// Unnormalized kernel transform sum_{u,v} h[u,v] e^{-j2pi(ku/U + lv/V)} (no
/// 1/UV), so that dft_forward(h (*) eta) == kernel_transform(h) * dft_forward(eta)
/// for circular convolution (*).
template <typename Derived>
SpectrumOf<typename Derived::Scalar> kernel_transform(const Eigen::ArrayBase<Derived>& h) {
  using Scalar = typename Derived::Scalar;
  return dft_forward(h) * Scalar(h.rows() * h.cols());
}

/// Circular convolution (h (*) x)[u,v] = sum_{a,b} h[a,b] x[(u-a) mod U, (v-b) mod V].
ImageGrid circular_convolve(const ImageGrid& h, const ImageGrid& x);

/// Places a small centred kernel (odd sizes) into a U x V grid with its centre
/// at (0,0), wrapping negative offsets.
ImageGrid wrap_kernel(const ImageGrid& small, Eigen::Index U, Eigen::Index V);

ImageGrid impulse_kernel(Eigen::Index U, Eigen::Index V);
ImageGrid box_kernel(int size, Eigen::Index U, Eigen::Index V);
/// h[u,0] = 1/U for all u: maps i.i.d. noise to column-constant stripes.
ImageGrid column_kernel(Eigen::Index U, Eigen::Index V);

}  // namespace fnsup

#endif  // FNSUP_GRID_HPP_
