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

#include "fnsup/grid.hpp"

#include <cmath>
#include <string>

namespace fnsup {

void require_valid(const ImageGrid& x, const char* what) {
  if (x.rows() < 1 || x.cols() < 1) {
    throw DimensionMismatch(std::string(what) + ": empty grid");
  }
  if (!x.isFinite().all()) {
    throw InvalidParam(std::string(what) + ": non-finite value in grid");
  }
}

void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(what) + ": shape " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                            "x" + std::to_string(b.cols()));
  }
}

ImageGrid circular_convolve(const ImageGrid& h, const ImageGrid& x) {
  require_same_shape(h, x, "circular_convolve");
  const Eigen::Index U = x.rows(), V = x.cols();
  // Small supports are summed directly, which keeps e.g. the identity kernel exact.
  constexpr Eigen::Index kDirectSupport = 64;
  if ((h != 0.0).count() <= kDirectSupport) {
    ImageGrid out = ImageGrid::Zero(U, V);
    for (Eigen::Index a = 0; a < U; ++a) {
      for (Eigen::Index b = 0; b < V; ++b) {
        const double w = h(a, b);
        if (w == 0.0) continue;
        for (Eigen::Index u = 0; u < U; ++u) {
          const Eigen::Index su = (u - a + U) % U;
          for (Eigen::Index v = 0; v < V; ++v) out(u, v) += w * x(su, (v - b + V) % V);
        }
      }
    }
    return out;
  }
  const Spectrum product = kernel_transform(h) * dft_forward(x);
  return dft_inverse(product);
}

ImageGrid wrap_kernel(const ImageGrid& small, Eigen::Index U, Eigen::Index V) {
  if (small.rows() % 2 == 0 || small.cols() % 2 == 0) {
    throw InvalidParam("wrap_kernel: kernel sides must be odd");
  }
  if (small.rows() > U || small.cols() > V) {
    throw DimensionMismatch("wrap_kernel: kernel larger than grid");
  }
  ImageGrid h = ImageGrid::Zero(U, V);
  const Eigen::Index ru = small.rows() / 2, rv = small.cols() / 2;
  for (Eigen::Index a = 0; a < small.rows(); ++a) {
    for (Eigen::Index b = 0; b < small.cols(); ++b) {
      h((a - ru + U) % U, (b - rv + V) % V) += small(a, b);
    }
  }
  return h;
}

ImageGrid impulse_kernel(Eigen::Index U, Eigen::Index V) {
  ImageGrid h = ImageGrid::Zero(U, V);
  h(0, 0) = 1.0;
  return h;
}

ImageGrid box_kernel(int size, Eigen::Index U, Eigen::Index V) {
  const ImageGrid small = ImageGrid::Constant(size, size, 1.0 / (size * size));
  return wrap_kernel(small, U, V);
}

ImageGrid column_kernel(Eigen::Index U, Eigen::Index V) {
  ImageGrid h = ImageGrid::Zero(U, V);
  h.col(0).setConstant(1.0 / static_cast<double>(U));
  return h;
}

}  // namespace fnsup
