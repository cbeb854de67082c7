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

#include "fnsup/noise.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace fnsup {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_nonneg(double x, const char* name) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw InvalidParam(std::string(name) + " must be finite and >= 0, got " + std::to_string(x));
  }
}

void require_reference(const ImageGrid& z, Eigen::Index U, Eigen::Index V, const char* family) {
  if (z.rows() != U || z.cols() != V) {
    throw DimensionMismatch(std::string(family) + ": reference is " + std::to_string(z.rows()) +
                            "x" + std::to_string(z.cols()) + ", expected " + std::to_string(U) +
                            "x" + std::to_string(V));
  }
}

template <typename Dist>
ImageGrid fill(Eigen::Index U, Eigen::Index V, const RngSeed& seed, Dist dist) {
  auto eng = seed.engine();
  ImageGrid n(U, V);
  for (Eigen::Index i = 0; i < n.size(); ++i) n.data()[i] = dist(eng);
  return n;
}

}  // namespace

bool NoiseSpec::is_iid() const {
  return std::holds_alternative<IidGaussian>(v) || std::holds_alternative<IidUniform>(v) ||
         std::holds_alternative<IidLaplace>(v);
}

std::string NoiseSpec::family() const {
  static const char* names[] = {"gaussian", "uniform",  "laplace",  "poisson", "hetgaussian",
                                "stationary", "stripe", "periodic", "mixture"};
  return names[v.index()];
}

NoiseSpec make_stationary(ImageGrid kernel, NoiseSpec inner) {
  return Stationary{std::move(kernel), std::make_shared<const NoiseSpec>(std::move(inner))};
}

NoiseSpec with_reference(const NoiseSpec& spec, const ImageGrid& z) {
  if (auto p = spec.as<PoissonCentered>()) return PoissonCentered{p->peak, z};
  if (auto h = spec.as<HetGaussian>()) return HetGaussian{h->alpha, h->beta, z};
  if (auto m = spec.as<Mixture>()) {
    Mixture out;
    for (const auto& part : m->parts) out.parts.push_back(with_reference(part, z));
    return out;
  }
  return spec;
}

double iid_variance(const NoiseSpec& spec) {
  if (auto g = spec.as<IidGaussian>()) return g->sigma * g->sigma;
  if (auto u = spec.as<IidUniform>()) return u->halfwidth * u->halfwidth / 3.0;
  if (auto l = spec.as<IidLaplace>()) return 2.0 * l->scale * l->scale;
  throw InvalidParam("iid_variance: " + spec.family() + " is not an i.i.d. family");
}

void validate(const NoiseSpec& spec, Eigen::Index U, Eigen::Index V) {
  if (U < 1 || V < 1) throw DimensionMismatch("noise grid must be at least 1x1");
  std::visit(
      overloaded{
          [](const IidGaussian& g) { require_nonneg(g.sigma, "gaussian sigma"); },
          [](const IidUniform& u) { require_nonneg(u.halfwidth, "uniform halfwidth"); },
          [](const IidLaplace& l) { require_nonneg(l.scale, "laplace scale"); },
          [&](const PoissonCentered& p) {
            require_nonneg(p.peak, "poisson peak");
            if (p.peak == 0.0) throw InvalidParam("poisson peak must be > 0");
            require_reference(p.reference, U, V, "poisson");
            if ((p.reference < 0.0).any()) throw InvalidParam("poisson reference must be >= 0");
          },
          [&](const HetGaussian& h) {
            require_nonneg(h.alpha, "hetgaussian alpha");
            require_nonneg(h.beta, "hetgaussian beta");
            require_reference(h.reference, U, V, "hetgaussian");
            if (h.alpha * h.reference.minCoeff() + h.beta < 0.0) {
              throw InvalidParam("hetgaussian: alpha*min(z)+beta < 0");
            }
          },
          [&](const Stationary& s) {
            if (!s.inner || !s.inner->is_iid()) {
              throw InvalidParam("stationary: inner noise must be an i.i.d. family");
            }
            validate(*s.inner, U, V);
            if (s.kernel.rows() != U || s.kernel.cols() != V) {
              throw DimensionMismatch("stationary: kernel must be wrapped to the grid size");
            }
            require_valid(s.kernel, "stationary kernel");
          },
          [](const Stripe& s) { require_nonneg(s.sigma, "stripe sigma"); },
          [](const Periodic& p) {
            for (const auto& c : p.components) require_nonneg(c.sigma_amp, "periodic sigma_amp");
          },
          [&](const Mixture& m) {
            for (const auto& part : m.parts) validate(part, U, V);
          },
      },
      spec.v);
}

ImageGrid sample_noise(const NoiseSpec& spec, Eigen::Index U, Eigen::Index V, const RngSeed& seed) {
  validate(spec, U, V);
  return std::visit(
      overloaded{
          [&](const IidGaussian& g) {
            return fill(U, V, seed, std::normal_distribution<double>(0.0, g.sigma));
          },
          [&](const IidUniform& u) {
            if (u.halfwidth == 0.0) return ImageGrid(ImageGrid::Zero(U, V));
            return fill(U, V, seed,
                        std::uniform_real_distribution<double>(-u.halfwidth, u.halfwidth));
          },
          [&](const IidLaplace& l) {
            // Difference of two exponentials with mean b is Laplace(0, b).
            if (l.scale == 0.0) return ImageGrid(ImageGrid::Zero(U, V));
            std::exponential_distribution<double> e(1.0 / l.scale);
            return fill(U, V, seed, [e](std::mt19937_64& g) mutable { return e(g) - e(g); });
          },
          [&](const PoissonCentered& p) {
            auto eng = seed.engine();
            ImageGrid n(U, V);
            for (Eigen::Index i = 0; i < n.size(); ++i) {
              const double z = p.reference.data()[i];
              const double mean = p.peak * z;
              double k = 0.0;
              if (mean > 0.0) {
                std::poisson_distribution<long long> d(mean);
                k = static_cast<double>(d(eng));
              }
              n.data()[i] = k / p.peak - z;
            }
            return n;
          },
          [&](const HetGaussian& h) {
            auto eng = seed.engine();
            std::normal_distribution<double> d(0.0, 1.0);
            ImageGrid n(U, V);
            for (Eigen::Index i = 0; i < n.size(); ++i) {
              n.data()[i] = std::sqrt(h.alpha * h.reference.data()[i] + h.beta) * d(eng);
            }
            return n;
          },
          [&](const Stationary& s) {
            return circular_convolve(s.kernel, sample_noise(*s.inner, U, V, seed));
          },
          [&](const Stripe& s) {
            auto eng = seed.engine();
            std::normal_distribution<double> d(0.0, s.sigma);
            ImageGrid n(U, V);
            if (s.axis == StripeAxis::Column) {
              for (Eigen::Index v = 0; v < V; ++v) n.col(v).setConstant(s.sigma == 0.0 ? 0.0 : d(eng));
            } else {
              for (Eigen::Index u = 0; u < U; ++u) n.row(u).setConstant(s.sigma == 0.0 ? 0.0 : d(eng));
            }
            return n;
          },
          [&](const Periodic& p) {
            auto eng = seed.engine();
            std::normal_distribution<double> amp(0.0, 1.0);
            std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
            ImageGrid n = ImageGrid::Zero(U, V);
            for (const auto& c : p.components) {
              const double A = c.sigma_amp * amp(eng);
              const double phi = phase(eng);
              for (Eigen::Index u = 0; u < U; ++u) {
                for (Eigen::Index v = 0; v < V; ++v) {
                  const double theta = 2.0 * std::numbers::pi *
                                       (static_cast<double>(c.k0 * u % U) / static_cast<double>(U) +
                                        static_cast<double>(c.l0 * v % V) / static_cast<double>(V));
                  n(u, v) += A * std::cos(theta + phi);
                }
              }
            }
            return n;
          },
          [&](const Mixture& m) {
            ImageGrid n = ImageGrid::Zero(U, V);
            for (std::size_t i = 0; i < m.parts.size(); ++i) {
              n += sample_noise(m.parts[i], U, V, seed.split(i));
            }
            return n;
          },
      },
      spec.v);
}

TrainingPair make_training_pair(const ImageGrid& z, const DegradationSpec& input,
                                const NoiseSpec& target, const RngSeed& seed) {
  require_valid(z, "make_training_pair");
  const Eigen::Index U = z.rows(), V = z.cols();
  TrainingPair pair;
  if (input.kind == DegradationSpec::Kind::Blur) {
    require_same_shape(input.blur_kernel, z, "make_training_pair blur kernel");
    pair.x = circular_convolve(input.blur_kernel, z);
  } else {
    pair.x = z;
  }
  if (input.noise) pair.x += sample_noise(*input.noise, U, V, seed.split(0));
  pair.y = z + sample_noise(target, U, V, seed.split(1));
  return pair;
}

ImageGrid gen_clean(const RngSeed& seed, Eigen::Index U, Eigen::Index V, int complexity) {
  if (complexity < 1) throw InvalidParam("gen_clean: complexity must be >= 1");
  auto eng = seed.engine();

  // Smooth background: white noise shaped by a Gaussian spectral envelope.
  std::normal_distribution<double> white(0.0, 1.0);
  ImageGrid w(U, V);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = white(eng);
  Spectrum W = dft_forward(w);
  constexpr double kBandwidth = 0.05;  // cycles per pixel
  for (Eigen::Index k = 0; k < U; ++k) {
    const double fk = static_cast<double>(std::min(k, U - k)) / static_cast<double>(U);
    for (Eigen::Index l = 0; l < V; ++l) {
      const double fl = static_cast<double>(std::min(l, V - l)) / static_cast<double>(V);
      W(k, l) *= std::exp(-(fk * fk + fl * fl) / (2.0 * kBandwidth * kBandwidth));
    }
  }
  ImageGrid img = dft_inverse(W);
  img -= img.mean();
  const double sd = std::sqrt(img.square().mean());
  img = 0.5 + (sd > 0.0 ? 0.1 / sd : 0.0) * img;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](double lo, double hi) { return lo + (hi - lo) * unit(eng); };
  const double Ud = static_cast<double>(U), Vd = static_cast<double>(V);
  const double side = std::min(Ud, Vd);
  for (int s = 0; s < complexity; ++s) {
    const double intensity = unit(eng);
    if (unit(eng) < 0.5) {
      const double h = pick(4.0, std::max(4.0, side / 2.0));
      const double wd = pick(4.0, std::max(4.0, side / 2.0));
      const double u0 = pick(0.0, Ud - h), v0 = pick(0.0, Vd - wd);
      for (Eigen::Index u = 0; u < U; ++u) {
        for (Eigen::Index v = 0; v < V; ++v) {
          if (u >= u0 && u < u0 + h && v >= v0 && v < v0 + wd) img(u, v) = intensity;
        }
      }
    } else {
      const double r = pick(3.0, std::max(3.0, side / 4.0));
      const double cu = pick(0.0, Ud), cv = pick(0.0, Vd);
      for (Eigen::Index u = 0; u < U; ++u) {
        for (Eigen::Index v = 0; v < V; ++v) {
          const double du = static_cast<double>(u) - cu, dv = static_cast<double>(v) - cv;
          if (du * du + dv * dv <= r * r) img(u, v) = intensity;
        }
      }
    }
  }
  return img.max(0.0).min(1.0);
}

}  // namespace fnsup
