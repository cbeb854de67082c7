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

#include "fnsup/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "fnsup/equivalence.hpp"
#include "fnsup/experiments.hpp"
#include "fnsup/image_io.hpp"
#include "fnsup/metrics.hpp"
#include "fnsup/model_io.hpp"
#include "fnsup/parallel.hpp"
#include "fnsup/report.hpp"
#include "fnsup/spectral_stats.hpp"
#include "fnsup/train.hpp"

namespace fs = std::filesystem;

namespace fnsup {

// ---------------------------------------------------------------- result

void CommandResult::add(const std::string& key, const std::string& value) {
  summary.emplace_back(key, value);
}

void CommandResult::add(const std::string& key, double value) { add(key, fmt(value)); }

const std::string& CommandResult::get(const std::string& key) const {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  throw InvalidParam("summary has no key '" + key + "'");
}

double CommandResult::number(const std::string& key) const {
  const std::string& v = get(key);
  double d = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw InvalidParam("summary value of '" + key + "' is not numeric: " + v);
  }
  return d;
}

std::string CommandResult::str() const {
  std::string out;
  for (const auto& [k, v] : summary) out += k + " = " + v + "\n";
  return out;
}

namespace {

std::string path_in(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string bin_text(const Bin& b) { return std::to_string(b.k) + ":" + std::to_string(b.l); }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

bool to_double(const std::string& s, double& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc() && p == s.data() + s.size();
}

int positive_int(Config& cfg, const std::string& section, const std::string& key, long long fallback,
                 long long min_value = 1) {
  const long long v = cfg.get_int(section, key, fallback);
  if (v < min_value || v > 100000000) {
    throw ConfigError(cfg.line_of(section, key), "key '" + key + "' in [" + section +
                                                     "] must be >= " + std::to_string(min_value));
  }
  return static_cast<int>(v);
}

double nonneg_double(Config& cfg, const std::string& section, const std::string& key,
                     double fallback) {
  const double v = cfg.get_double(section, key, fallback);
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ConfigError(cfg.line_of(section, key),
                      "key '" + key + "' in [" + section + "] must be a finite value >= 0");
  }
  return v;
}

std::string choice(Config& cfg, const std::string& section, const std::string& key,
                   const std::string& fallback, const std::vector<std::string>& allowed) {
  const std::string v = cfg.get_string(section, key, fallback);
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
    throw ConfigError(cfg.line_of(section, key),
                      "key '" + key + "' in [" + section + "]: expected " + list + ", got '" + v +
                          "'");
  }
  return v;
}

// ---------------------------------------------------------------- noise

std::optional<NoiseSpec> iid_from(Config& cfg, const std::string& s, const std::string& family,
                                  const std::string& prefix) {
  if (family == "gaussian") return NoiseSpec{IidGaussian{cfg.require_double(s, prefix + "sigma")}};
  if (family == "uniform") {
    return NoiseSpec{IidUniform{cfg.require_double(s, prefix + "halfwidth")}};
  }
  if (family == "laplace") return NoiseSpec{IidLaplace{cfg.require_double(s, prefix + "scale")}};
  return std::nullopt;
}

ImageGrid reference_from(Config& cfg, const std::string& s, Eigen::Index U, Eigen::Index V,
                         std::uint64_t seed) {
  const std::string r = cfg.get_string(s, "reference", "0.5");
  if (r == "procedural") return gen_clean({seed, 0x726566ULL}, U, V, 20);
  double level = 0.0;
  if (!to_double(r, level) || !(level >= 0.0)) {
    throw ConfigError(cfg.line_of(s, "reference"),
                      "key 'reference' in [" + s + "]: expected a level >= 0 or 'procedural'");
  }
  return ImageGrid::Constant(U, V, level);
}

NoiseSpec build_noise(Config& cfg, const std::string& s, Eigen::Index U, Eigen::Index V,
                      std::uint64_t seed, int depth) {
  if (depth > 8) throw ConfigError(cfg.line_of(s, "parts"), "mixture nesting too deep");
  const std::string family =
      choice(cfg, s, "family", "",
             {"gaussian", "uniform", "laplace", "poisson", "hetgaussian", "stationary", "stripe",
              "periodic", "mixture"});
  if (auto iid = iid_from(cfg, s, family, "")) return *iid;
  if (family == "poisson") {
    return PoissonCentered{cfg.require_double(s, "peak"), reference_from(cfg, s, U, V, seed)};
  }
  if (family == "hetgaussian") {
    return HetGaussian{cfg.require_double(s, "alpha"), cfg.require_double(s, "beta"),
                       reference_from(cfg, s, U, V, seed)};
  }
  if (family == "stationary") {
    const std::string kernel = choice(cfg, s, "kernel", "box", {"box", "impulse", "column"});
    ImageGrid h;
    if (kernel == "box") {
      const int size = positive_int(cfg, s, "kernel_size", 3);
      if (size % 2 == 0 || size > std::min(U, V)) {
        throw ConfigError(cfg.line_of(s, "kernel_size"),
                          "kernel_size must be odd and fit inside the grid");
      }
      h = box_kernel(size, U, V);
    } else {
      h = kernel == "impulse" ? impulse_kernel(U, V) : column_kernel(U, V);
    }
    const std::string inner = choice(cfg, s, "inner", "gaussian", {"gaussian", "uniform", "laplace"});
    return make_stationary(std::move(h), *iid_from(cfg, s, inner, "inner_"));
  }
  if (family == "stripe") {
    const std::string axis = choice(cfg, s, "axis", "column", {"column", "row"});
    return Stripe{cfg.require_double(s, "sigma"),
                  axis == "column" ? StripeAxis::Column : StripeAxis::Row};
  }
  if (family == "periodic") {
    Periodic p;
    for (const auto& item : split_list(cfg.require_string(s, "components"))) {
      std::vector<std::string> f;
      std::istringstream in(item);
      std::string part;
      while (std::getline(in, part, ':')) f.push_back(part);
      double k = 0, l = 0, amp = 0;
      if (f.size() != 3 || !to_double(f[0], k) || !to_double(f[1], l) || !to_double(f[2], amp) ||
          k != std::floor(k) || l != std::floor(l)) {
        throw ConfigError(cfg.line_of(s, "components"),
                          "key 'components' in [" + s + "]: expected entries like '0:8:0.05'");
      }
      p.components.push_back({static_cast<int>(k), static_cast<int>(l), amp});
    }
    return p;
  }
  // mixture
  Mixture m;
  for (const auto& name : split_list(cfg.require_string(s, "parts"))) {
    const std::string sub = "noise." + name;
    if (!cfg.has_section(sub)) {
      throw ConfigError(cfg.line_of(s, "parts"), "mixture part [" + sub + "] is not defined");
    }
    m.parts.push_back(build_noise(cfg, sub, U, V, seed, depth + 1));
  }
  if (m.parts.empty()) throw ConfigError(cfg.line_of(s, "parts"), "mixture has no parts");
  return m;
}

Eigen::Index grid_dim(Config& cfg, const std::string& key, Eigen::Index fallback) {
  return positive_int(cfg, "noise", key, fallback);
}

// Bins (and their conjugates) touched by periodic components of a spec.
void periodic_bins(const NoiseSpec& spec, Eigen::Index U, Eigen::Index V, std::vector<Bin>& out) {
  if (auto p = spec.as<Periodic>()) {
    for (const auto& c : p->components) {
      const Bin b{static_cast<int>(((c.k0 % U) + U) % U), static_cast<int>(((c.l0 % V) + V) % V)};
      for (const Bin& x : {b, conjugate_bin(b, U, V)}) {
        if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
      }
    }
  } else if (auto m = spec.as<Mixture>()) {
    for (const auto& part : m->parts) periodic_bins(part, U, V, out);
  }
}

// ---------------------------------------------------------------- helpers

struct HistogramBin {
  double center;
  long count;
  double gaussian;  // expected count under N(mean, sample variance)
};

std::vector<HistogramBin> histogram(const Eigen::VectorXd& x, int nbins) {
  const double mean = x.mean();
  const double sd = x.size() > 1 ? std::sqrt((x.array() - mean).square().sum() / (x.size() - 1))
                                 : 0.0;
  const double half = sd > 0.0 ? 4.0 * sd : 0.5;
  const double lo = mean - half, width = 2.0 * half / nbins;
  std::vector<HistogramBin> out(static_cast<std::size_t>(nbins));
  for (int b = 0; b < nbins; ++b) out[static_cast<std::size_t>(b)] = {lo + (b + 0.5) * width, 0, 0.0};
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const long b = static_cast<long>(std::floor((x(i) - lo) / width));
    ++out[static_cast<std::size_t>(std::clamp<long>(b, 0, nbins - 1))].count;
  }
  if (sd > 0.0) {
    auto cdf = [&](double t) { return 0.5 * std::erfc(-(t - mean) / (sd * std::sqrt(2.0))); };
    for (auto& h : out) {
      h.gaussian = static_cast<double>(x.size()) * (cdf(h.center + 0.5 * width) - cdf(h.center - 0.5 * width));
    }
  }
  return out;
}

struct Dataset {
  std::vector<ImageGrid> train, test;
};

Dataset load_dataset(Config& cfg, std::uint64_t seed) {
  const std::string kind = choice(cfg, "io", "dataset", "procedural", {"procedural", "directory"});
  Dataset d;
  if (kind == "procedural") {
    const int ntrain = positive_int(cfg, "io", "train_images", 200);
    const int ntest = positive_int(cfg, "io", "test_images", 20);
    const int size = positive_int(cfg, "io", "image_size", 64, 2);
    const int complexity = positive_int(cfg, "io", "complexity", 20);
    const RngSeed root{seed, 0x696d67ULL};
    d.train = procedural_images(ntrain, size, complexity, root.split(0));
    d.test = procedural_images(ntest, size, complexity, root.split(1));
    return d;
  }
  const std::string dir = cfg.require_string("io", "image_dir");
  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (e.is_regular_file() && (ext == ".pgm" || ext == ".png")) files.push_back(e.path().string());
  }
  if (ec) throw IoError("cannot list image directory '" + dir + "': " + ec.message());
  std::sort(files.begin(), files.end());
  const int ntest = positive_int(cfg, "io", "test_images", 20, 0);
  if (files.size() < static_cast<std::size_t>(ntest) + 2) {
    throw ConfigError(cfg.line_of("io", "image_dir"),
                      "image directory '" + dir + "' holds " + std::to_string(files.size()) +
                          " images; need at least test_images + 2");
  }
  const std::size_t split = files.size() - static_cast<std::size_t>(ntest);
  for (std::size_t i = 0; i < files.size(); ++i) {
    ImageGrid g = image_read(files[i]);
    if (!d.train.empty() && (g.rows() != d.train.front().rows() || g.cols() != d.train.front().cols())) {
      throw DimensionMismatch("image '" + files[i] + "' differs in size from the first image");
    }
    (i < split ? d.train : d.test).push_back(std::move(g));
  }
  return d;
}

Penalty penalty_from(Config& cfg, const std::string& s, const std::string& fallback_kind) {
  const std::string kind = choice(cfg, s, "penalty", fallback_kind, {"huber", "abspow"});
  if (kind == "huber") {
    const double delta = cfg.get_double(s, "delta", 0.03);
    if (!(delta > 0.0)) throw ConfigError(cfg.line_of(s, "delta"), "delta must be > 0");
    return Penalty::huber(delta);
  }
  const double q = cfg.get_double(s, "q", 1.0);
  if (!(q >= 1.0)) throw ConfigError(cfg.line_of(s, "q"), "q must be >= 1 for training");
  return Penalty::abs_pow(q);
}

OptimizerSpec optimizer_from(Config& cfg, const std::string& s) {
  OptimizerSpec o;
  o.kind = choice(cfg, s, "optimizer", "adam", {"adam", "sgd"}) == "adam" ? OptimizerSpec::Kind::Adam
                                                                         : OptimizerSpec::Kind::SGD;
  o.lr = nonneg_double(cfg, s, "lr", 1e-3);
  if (o.kind == OptimizerSpec::Kind::Adam) {
    o.beta1 = cfg.get_double(s, "beta1", 0.9);
    o.beta2 = cfg.get_double(s, "beta2", 0.999);
    o.eps = cfg.get_double(s, "eps", 1e-8);
  }
  return o;
}

ConvNetShape shape_from(Config& cfg, const std::string& s) {
  ConvNetShape sh;
  sh.layers = positive_int(cfg, s, "layers", 3);
  sh.kernel = positive_int(cfg, s, "kernel", 3);
  sh.channels = positive_int(cfg, s, "channels", 8);
  if (sh.kernel % 2 == 0) throw ConfigError(cfg.line_of(s, "kernel"), "kernel size must be odd");
  return sh;
}

// Energy of dft_forward(r) outside the k = 0 row.
double non_k0_energy(const ImageGrid& r) {
  const Spectrum F = dft_forward(r);
  return F.abs2().sum() - F.row(0).abs2().sum();
}

void write_curve_svg(const std::string& path, const std::vector<double>& x,
                     const std::vector<double>& psnr, const std::string& xlabel) {
  write_text(path, svg_lines({{"held-out PSNR", x, psnr}}, "held-out PSNR", xlabel, "dB"));
}

}  // namespace

NoiseSpec noise_from_config(Config& cfg, const std::string& section, Eigen::Index U,
                            Eigen::Index V, std::uint64_t seed) {
  if (!cfg.has_section(section)) throw ConfigError(0, "missing section [" + section + "]");
  NoiseSpec spec = build_noise(cfg, section, U, V, seed, 0);
  try {
    validate(spec, U, V);
  } catch (const Error& e) {
    throw ConfigError(cfg.line_of(section, "family"), "[" + section + "]: " + e.what());
  }
  return spec;
}

// ---------------------------------------------------------------- commands

CommandResult cmd_analyze_noise(Config& cfg, const std::string& out) {
  const std::uint64_t seed = cfg.get_u64("io", "seed", 0);
  const Eigen::Index U = grid_dim(cfg, "height", 64), V = grid_dim(cfg, "width", U);
  const NoiseSpec spec = noise_from_config(cfg, "noise", U, V, seed);
  const int M = positive_int(cfg, "analysis", "M", 10000, 100);
  const std::vector<Bin> bins = cfg.get_bins("analysis", "bins", {{5, 7}, {1, 1}, {2, 3}, {0, 1}});
  GaussianityThresholds th;
  th.skew = cfg.get_double("analysis", "skew_threshold", th.skew);
  th.kurt = cfg.get_double("analysis", "kurt_threshold", th.kurt);
  th.ks_scale = cfg.get_double("analysis", "ks_scale", th.ks_scale);
  const int nbins = positive_int(cfg, "analysis", "histogram_bins", 41, 2);
  const auto pixel = cfg.get_bins("analysis", "pixel", {{static_cast<int>(U / 2), static_cast<int>(V / 2)}});
  for (const Bin& b : bins) {
    if (b.k < 0 || b.l < 0 || b.k >= U || b.l >= V) {
      throw ConfigError(cfg.line_of("analysis", "bins"), "bin " + bin_text(b) + " outside the grid");
    }
  }
  if (pixel.size() != 1 || pixel[0].k < 0 || pixel[0].l < 0 || pixel[0].k >= U || pixel[0].l >= V) {
    throw ConfigError(cfg.line_of("analysis", "pixel"), "pixel must be one in-grid 'u:v' entry");
  }

  const RngSeed mc{seed, 0x616e61ULL};
  const auto sets = monte_carlo_coeffs(spec, U, V, bins, M, mc);
  Eigen::VectorXd px(M);
  {
    const auto vals = parallel_map<double>(static_cast<std::size_t>(M), [&](std::size_t m) {
      return sample_noise(spec, U, V, mc.split(m))(pixel[0].k, pixel[0].l);
    });
    for (int m = 0; m < M; ++m) px(m) = vals[static_cast<std::size_t>(m)];
  }
  CsvTable hs({"center", "count", "gaussian"});
  for (const auto& h : histogram(px, nbins)) {
    hs.row({fmt(h.center), std::to_string(h.count), fmt(h.gaussian)});
  }
  hs.write(path_in(out, "histogram_spatial.csv"));

  CsvTable hf({"k", "l", "component", "center", "count", "gaussian"});
  CsvTable gt({"k", "l", "component", "mean", "variance", "skewness", "excess_kurtosis",
               "ks_statistic", "ks_threshold", "degenerate", "pass"});
  int tested = 0, passed = 0;
  double ks_max = 0.0;
  for (const auto& s : sets) {
    const CoeffGaussianity g = gaussianity_test(s, th);
    for (int c = 0; c < 2; ++c) {
      const GaussianityReport& r = c == 0 ? g.a : g.b;
      const Eigen::VectorXd& x = c == 0 ? s.a : s.b;
      const std::string comp = c == 0 ? "a" : "b";
      gt.row({std::to_string(s.bin.k), std::to_string(s.bin.l), comp, fmt(r.mean), fmt(r.variance),
              fmt(r.skewness), fmt(r.excess_kurtosis), fmt(r.ks_statistic),
              fmt(th.ks_scale / std::sqrt(static_cast<double>(M))), r.degenerate ? "1" : "0",
              r.pass ? "1" : "0"});
      if (!r.degenerate) {
        ++tested;
        passed += r.pass;
        ks_max = std::max(ks_max, r.ks_statistic);
      }
      for (const auto& h : histogram(x, nbins)) {
        hf.row({std::to_string(s.bin.k), std::to_string(s.bin.l), comp, fmt(h.center),
                std::to_string(h.count), fmt(h.gaussian)});
      }
    }
  }
  hf.write(path_in(out, "histogram_fourier.csv"));
  gt.write(path_in(out, "gaussianity.csv"));

  CsvTable it({"k1", "l1", "c1", "k2", "l2", "c2", "correlation", "threshold", "pass"});
  int ipass = 0;
  auto record = [&](const CoeffSampleSet& s1, Component c1, const CoeffSampleSet& s2, Component c2) {
    const IndependenceResult r = independence_test(s1, c1, s2, c2);
    it.row({std::to_string(s1.bin.k), std::to_string(s1.bin.l), c1 == Component::A ? "a" : "b",
            std::to_string(s2.bin.k), std::to_string(s2.bin.l), c2 == Component::A ? "a" : "b",
            fmt(r.correlation), fmt(r.threshold), r.pass ? "1" : "0"});
    ipass += r.pass;
  };
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (!is_self_conjugate(sets[i].bin, U, V)) record(sets[i], Component::A, sets[i], Component::B);
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      if (sets[j].bin == sets[i].bin || conjugate_bin(sets[i].bin, U, V) == sets[j].bin) continue;
      record(sets[i], Component::A, sets[j], Component::A);
    }
  }
  it.write(path_in(out, "independence.csv"));

  CommandResult res;
  res.add("family", spec.family());
  res.add("M", M);
  res.add("components_tested", tested);
  res.add("gaussianity_pass_rate", tested ? static_cast<double>(passed) / tested : 1.0);
  res.add("ks_max", ks_max);
  res.add("ks_threshold", th.ks_scale / std::sqrt(static_cast<double>(M)));
  res.add("independence_pass_rate",
          it.rows() ? static_cast<double>(ipass) / static_cast<double>(it.rows()) : 1.0);
  return res;
}

CommandResult cmd_variance_map(Config& cfg, const std::string& out) {
  const std::uint64_t seed = cfg.get_u64("io", "seed", 0);
  const Eigen::Index U = grid_dim(cfg, "height", 32), V = grid_dim(cfg, "width", U);
  const NoiseSpec spec = noise_from_config(cfg, "noise", U, V, seed);
  const int M = positive_int(cfg, "analysis", "M", 2000, 2);
  const double p = cfg.get_double("analysis", "sparsity_p", 0.99);
  if (!(p > 0.0 && p <= 1.0)) {
    throw ConfigError(cfg.line_of("analysis", "sparsity_p"), "sparsity_p must lie in (0, 1]");
  }
  const VarianceMap emp = variance_map_empirical(spec, U, V, M, {seed, 0x766172ULL});
  const VarianceMap theo = variance_map_analytic(spec, U, V);
  write_text(path_in(out, "variance_map_empirical.csv"), grid_csv(emp));
  write_text(path_in(out, "variance_map_theoretical.csv"), grid_csv(theo));
  write_text(path_in(out, "variance_map_empirical.svg"),
             svg_heatmap(emp, "empirical variance map, " + spec.family(), true));
  write_text(path_in(out, "variance_map_theoretical.svg"),
             svg_heatmap(theo, "theoretical variance map, " + spec.family(), true));

  // Relative deviation is only meaningful where the theoretical map has mass.
  const double floor = 1e-6 * theo.maxCoeff();
  double max_dev = 0.0, sum_dev = 0.0;
  int compared = 0;
  for (Eigen::Index i = 0; i < theo.size(); ++i) {
    if (theo.data()[i] > floor) {
      const double d = std::abs(emp.data()[i] - theo.data()[i]) / theo.data()[i];
      max_dev = std::max(max_dev, d);
      sum_dev += d;
      ++compared;
    }
  }
  const double total = emp.sum();
  CommandResult res;
  res.add("family", spec.family());
  res.add("M", M);
  res.add("sparsity_p", p);
  res.add("sparsity_index", sparsity_index(emp, p));
  res.add("sparsity_index_theoretical", sparsity_index(theo, p));
  res.add("k0_mass_fraction", total > 0.0 ? emp.row(0).sum() / total : 0.0);
  res.add("bins_compared", compared);
  res.add("max_rel_deviation", max_dev);
  res.add("mean_rel_deviation", compared ? sum_dev / compared : 0.0);
  return res;
}

CommandResult cmd_verify_equivalence(Config& cfg, const std::string& out) {
  const std::uint64_t seed = cfg.get_u64("io", "seed", 0);
  const Eigen::Index U = grid_dim(cfg, "height", 32), V = grid_dim(cfg, "width", U);
  const NoiseSpec spec = noise_from_config(cfg, "noise", U, V, seed);
  const std::string S = "equivalence";
  const Penalty phi = penalty_from(cfg, S, "huber");
  const double sigma = nonneg_double(cfg, S, "curve_sigma", 0.2);
  const double lo = cfg.get_double(S, "t_min", -1.0), hi = cfg.get_double(S, "t_max", 1.0);
  const int points = positive_int(cfg, S, "points", 401, 2);
  if (!(hi > lo)) throw ConfigError(cfg.line_of(S, "t_max"), "t_max must exceed t_min");
  const double rms = nonneg_double(cfg, S, "residual_rms", 0.2);
  const int M = positive_int(cfg, S, "M", 20000, 2);
  const std::string map_kind = choice(cfg, S, "map", "analytic", {"analytic", "empirical"});

  const BlurredPenalty bp{phi};
  CsvTable curve({"t", "phi", "phi_blurred", "phi_blurred_derivative"});
  SvgSeries s_phi{"phi", {}, {}}, s_blur{"phi blurred", {}, {}};
  for (const CurvePoint& c : blurred_curve(bp, sigma, lo, hi, points)) {
    curve.row({c.t, c.phi, c.blurred, c.derivative});
    s_phi.x.push_back(c.t);
    s_phi.y.push_back(c.phi);
    s_blur.x.push_back(c.t);
    s_blur.y.push_back(c.blurred);
  }
  curve.write(path_in(out, "curve.csv"));
  write_text(path_in(out, "curve.svg"),
             svg_lines({s_phi, s_blur}, phi.describe() + ", sigma " + fmt(sigma), "t", "penalty"));

  const ImageGrid z = gen_clean({seed, 0x7aULL}, U, V, 20);
  const ImageGrid f = z + sample_noise(IidGaussian{rms}, U, V, {seed, 0x66ULL});
  std::optional<VarianceMap> map;
  if (map_kind == "empirical") map = variance_map_empirical(spec, U, V, M, {seed, 0x6d6170ULL});
  const EquivalenceGap g = equivalence_gap(f, z, spec, phi, M, {seed, 0x6571ULL}, map);
  CsvTable eq({"gap", "se", "M", "mc_mean", "blurred", "relative_se"});
  eq.row({g.gap, g.standard_error, static_cast<double>(g.M), g.mc_mean, g.blurred,
          g.standard_error / g.blurred});
  eq.write(path_in(out, "equivalence.csv"));

  const bool argmin = argmin_check(bp, sigma);
  CommandResult res;
  res.add("penalty", phi.describe());
  res.add("gap", g.gap);
  res.add("se", g.standard_error);
  res.add("relative_se", g.standard_error / g.blurred);
  res.add("M", g.M);
  res.add("mc_mean", g.mc_mean);
  res.add("blurred", g.blurred);
  res.add("argmin_check", argmin ? "PASS" : "FAIL");
  return res;
}

CommandResult cmd_train(Config& cfg, const std::string& out) {
  const std::uint64_t seed = cfg.get_u64("io", "seed", 0);
  const Dataset data = load_dataset(cfg, seed);
  const Eigen::Index U = data.train.front().rows(), V = data.train.front().cols();
  const NoiseSpec target = noise_from_config(cfg, "noise", U, V, seed);
  std::optional<NoiseSpec> input;
  if (cfg.has_section("input_noise")) input = noise_from_config(cfg, "input_noise", U, V, seed);

  const std::string S = "train";
  const std::string model_kind = choice(cfg, S, "model", "convnet", {"convnet", "spectral"});
  const std::string loss_kind =
      choice(cfg, S, "loss", "fourier_full", {"fourier_full", "fourier_k0", "spatial_l2"});
  TrainConfig tc;
  if (loss_kind == "spatial_l2") {
    tc.loss = LossSpec::spatial_l2();
  } else {
    const Penalty phi = penalty_from(cfg, S, "huber");
    tc.loss = loss_kind == "fourier_full" ? LossSpec::fourier_full(phi) : LossSpec::fourier_k0(phi);
  }
  tc.optimizer = optimizer_from(cfg, S);
  tc.schedule = choice(cfg, S, "schedule", "constant", {"constant", "cosine"}) == "cosine"
                    ? LrSchedule::Cosine
                    : LrSchedule::Constant;
  tc.epochs = positive_int(cfg, S, "epochs", 10, 0);
  tc.batch_size = positive_int(cfg, S, "batch_size", 8);
  tc.target = choice(cfg, S, "target", "noisy", {"noisy", "clean"}) == "clean" ? TargetMode::Clean
                                                                              : TargetMode::Noisy;
  tc.seed = seed;
  const std::uint64_t init_seed = cfg.get_u64(S, "init_seed", seed);

  std::unique_ptr<Model> model;
  if (model_kind == "spectral") {
    const int patch = positive_int(cfg, S, "patch_size", 0, 0);
    if (patch != 0 && (patch != U || patch != V)) {
      throw ConfigError(cfg.line_of(S, "patch_size"),
                        "the spectral model trains on whole images; use patch_size = 0");
    }
    tc.patch_size = 0;
    model = std::make_unique<SpectralDiagonalModel>(U, V);
  } else {
    tc.patch_size = positive_int(cfg, S, "patch_size", 32, 0);
    if (tc.patch_size > std::min(U, V)) {
      throw ConfigError(cfg.line_of(S, "patch_size"), "patch_size exceeds the image size");
    }
    auto net = std::make_unique<ConvNetModel>(shape_from(cfg, S));
    net->init_uniform({init_seed, 0x696e6974ULL});
    model = std::move(net);
  }
  std::vector<Bin> probe_default;
  periodic_bins(target, U, V, probe_default);
  const std::vector<Bin> probe = cfg.get_bins(S, "probe_bins", probe_default);
  for (const Bin& b : probe) {
    if (b.k < 0 || b.l < 0 || b.k >= U || b.l >= V) {
      throw ConfigError(cfg.line_of(S, "probe_bins"), "bin " + bin_text(b) + " outside the grid");
    }
  }

  const RngSeed ns{seed, 0x6e6f6973ULL};
  const auto train_set = make_examples(data.train, input, target, ns.split(0));
  const auto test_set = make_examples(data.test, input, target, ns.split(1));
  const TrainResult tr = train(*model, train_set, test_set, tc);

  CsvTable curve({"epoch", "loss", "psnr"});
  std::vector<double> ex, ey;
  for (const auto& r : tr.curve) {
    curve.row({std::to_string(r.epoch), fmt(r.loss), fmt(r.psnr)});
    ex.push_back(r.epoch);
    ey.push_back(r.psnr);
  }
  curve.write(path_in(out, "curve.csv"));
  write_curve_svg(path_in(out, "curve.svg"), ex, ey, "epoch");
  model_save(path_in(out, "model.fnsm"), *model);

  CsvTable metrics({"image", "psnr_input", "psnr_output", "ssim_input", "ssim_output",
                    "probe_energy_input", "probe_energy_output"});
  struct Row {
    MetricsReport in, outm;
    double pin, pout;
  };
  const auto rows = parallel_map<Row>(test_set.size(), [&](std::size_t i) {
    const Example& e = test_set[i];
    const ImageGrid f = model->forward(e.x);
    return Row{evaluate(e.x, e.z), evaluate(f, e.z), bin_energy(e.x - e.z, probe),
               bin_energy(f - e.z, probe)};
  });
  double psnr_sum = 0, ssim_sum = 0, pin = 0, pout = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    metrics.row({std::to_string(i), fmt(r.in.psnr), fmt(r.outm.psnr), fmt(r.in.ssim),
                 fmt(r.outm.ssim), fmt(r.pin), fmt(r.pout)});
    psnr_sum += r.outm.psnr;
    ssim_sum += r.outm.ssim;
    pin += r.pin;
    pout += r.pout;
  }
  metrics.write(path_in(out, "metrics.csv"));

  const double n = static_cast<double>(std::max<std::size_t>(rows.size(), 1));
  CommandResult res;
  res.add("model", model_kind);
  res.add("loss", loss_kind == "spatial_l2" ? std::string("spatial_l2")
                                            : loss_kind + " " + tc.loss.phi.describe());
  res.add("target", tc.target == TargetMode::Clean ? "clean" : "noisy");
  res.add("epochs", tc.epochs);
  res.add("final_loss", tr.curve.empty() ? 0.0 : tr.curve.back().loss);
  res.add("final_psnr", heldout_psnr(*model, test_set));
  res.add("mean_ssim", ssim_sum / n);
  res.add("probe_bins", static_cast<double>(probe.size()));
  res.add("probe_energy_input", pin);
  res.add("probe_energy_output", pout);
  return res;
}

CommandResult cmd_destripe(Config& cfg, const std::string& out) {
  const std::uint64_t seed = cfg.get_u64("io", "seed", 0);
  const Dataset data = load_dataset(cfg, seed);
  const Eigen::Index U = data.train.front().rows(), V = data.train.front().cols();
  const NoiseSpec stripes = noise_from_config(cfg, "noise", U, V, seed);
  const std::string S = "usr";
  UsrConfig uc;
  uc.phi = penalty_from(cfg, S, "abspow");
  uc.optimizer = optimizer_from(cfg, S);
  uc.epsilon = cfg.get_double(S, "epsilon", 1.2);
  if (!(uc.epsilon > 1.0)) throw ConfigError(cfg.line_of(S, "epsilon"), "epsilon must be > 1");
  uc.steps = positive_int(cfg, S, "steps", 2000, 0);
  uc.batch_size = positive_int(cfg, S, "batch_size", 8);
  uc.patch_size = positive_int(cfg, S, "patch_size", 32, 0);
  if (uc.patch_size > std::min(U, V)) {
    throw ConfigError(cfg.line_of(S, "patch_size"), "patch_size exceeds the image size");
  }
  uc.log_every = positive_int(cfg, S, "log_every", 100);
  uc.seed = seed;
  ConvNetModel model(shape_from(cfg, S));
  model.init_uniform({cfg.get_u64(S, "init_seed", seed), 0x696e6974ULL});
  const bool write_images = choice(cfg, "io", "write_images", "true", {"true", "false"}) == "true";
  const int depth = static_cast<int>(cfg.get_int("io", "bit_depth", 16));
  if (depth != 8 && depth != 16) throw ConfigError(cfg.line_of("io", "bit_depth"), "bit_depth must be 8 or 16");

  const RngSeed ns{seed, 0x6e6f6973ULL};
  const auto train_set = make_examples(data.train, std::nullopt, stripes, ns.split(0));
  const auto test_noisy = make_examples(data.test, std::nullopt, stripes, ns.split(1));
  std::vector<ImageGrid> noisy;
  for (const auto& e : train_set) noisy.push_back(e.y);
  std::vector<Example> test_set;
  for (const auto& e : test_noisy) test_set.push_back({e.y, e.y, e.z});
  const auto log = usr_train(noisy, model, uc, test_set);

  CsvTable curve({"step", "loss", "psnr"});
  std::vector<double> sx, sy;
  for (const auto& r : log) {
    curve.row({std::to_string(r.step), fmt(r.loss), fmt(r.psnr)});
    sx.push_back(r.step);
    sy.push_back(r.psnr);
  }
  curve.write(path_in(out, "curve.csv"));
  write_curve_svg(path_in(out, "curve.svg"), sx, sy, "step");
  model_save(path_in(out, "model.fnsm"), model);

  struct Row {
    ImageGrid f;
    MetricsReport in, outm;
    double k0_in, k0_out, rest_in, rest_out;
  };
  const auto rows = parallel_map<Row>(test_set.size(), [&](std::size_t i) {
    const Example& e = test_set[i];
    ImageGrid f = model.forward(e.x);
    const ImageGrid rin = e.x - e.z, rout = f - e.z;
    return Row{f, evaluate(e.x, e.z), evaluate(f, e.z), k0_energy(rin), k0_energy(rout),
               non_k0_energy(rin), non_k0_energy(rout)};
  });
  CsvTable metrics({"image", "psnr_input", "psnr_output", "ssim_input", "ssim_output",
                    "k0_energy_input", "k0_energy_output", "non_k0_energy_input",
                    "non_k0_energy_output"});
  double k0_in = 0, k0_out = 0, rest_in = 0, rest_out = 0, gain = 0;
  if (write_images) {
    std::error_code ec;
    fs::create_directories(path_in(out, "destriped"), ec);
    if (ec) throw IoError("cannot create '" + path_in(out, "destriped") + "': " + ec.message());
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    metrics.row({std::to_string(i), fmt(r.in.psnr), fmt(r.outm.psnr), fmt(r.in.ssim),
                 fmt(r.outm.ssim), fmt(r.k0_in), fmt(r.k0_out), fmt(r.rest_in), fmt(r.rest_out)});
    k0_in += r.k0_in;
    k0_out += r.k0_out;
    rest_in += r.rest_in;
    rest_out += r.rest_out;
    gain += r.outm.psnr - r.in.psnr;
    if (write_images) {
      char name[32];
      std::snprintf(name, sizeof name, "destriped/%03zu.png", i);
      image_write(path_in(out, name), r.f, depth, ImageFormat::Png);
    }
  }
  metrics.write(path_in(out, "metrics.csv"));

  const double n = static_cast<double>(std::max<std::size_t>(rows.size(), 1));
  CommandResult res;
  res.add("steps", uc.steps);
  res.add("epsilon", uc.epsilon);
  res.add("final_loss", log.empty() ? 0.0 : log.back().loss);
  res.add("k0_energy_reduction", k0_in > 0.0 ? 1.0 - k0_out / k0_in : 0.0);
  res.add("psnr_gain", gain / n);
  res.add("collateral_change", rest_in > 0.0 ? std::abs(rest_out - rest_in) / rest_in : 0.0);
  return res;
}

CommandResult cmd_eval(Config& cfg, const std::string& out) {
  const std::uint64_t seed = cfg.get_u64("io", "seed", 0);
  const std::string model_path = cfg.require_string("eval", "model");
  const double peak = cfg.get_double("eval", "peak", 1.0);
  if (!(peak > 0.0)) throw ConfigError(cfg.line_of("eval", "peak"), "peak must be > 0");
  const auto model = model_load(model_path);
  const Dataset data = load_dataset(cfg, seed);
  const Eigen::Index U = data.test.empty() ? 0 : data.test.front().rows();
  const Eigen::Index V = data.test.empty() ? 0 : data.test.front().cols();
  if (data.test.empty()) throw ConfigError(cfg.line_of("io", "test_images"), "no test images");
  const NoiseSpec noise = noise_from_config(cfg, "noise", U, V, seed);
  const RngSeed ns{seed, 0x6e6f6973ULL};
  const auto test_set = make_examples(data.test, std::nullopt, noise, ns.split(1));
  const auto rows = parallel_map<std::pair<MetricsReport, MetricsReport>>(
      test_set.size(), [&](std::size_t i) {
        const Example& e = test_set[i];
        return std::make_pair(evaluate(e.y, e.z, peak), evaluate(model->forward(e.y), e.z, peak));
      });
  CsvTable metrics({"image", "psnr_input", "psnr_output", "ssim_input", "ssim_output"});
  double pin = 0, pout = 0, ssim_in = 0, ssim_out = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [a, b] = rows[i];
    metrics.row({std::to_string(i), fmt(a.psnr), fmt(b.psnr), fmt(a.ssim), fmt(b.ssim)});
    pin += a.psnr;
    pout += b.psnr;
    ssim_in += a.ssim;
    ssim_out += b.ssim;
  }
  metrics.write(path_in(out, "metrics.csv"));
  const double n = static_cast<double>(rows.size());
  CommandResult res;
  res.add("images", n);
  res.add("psnr_input", pin / n);
  res.add("psnr_output", pout / n);
  res.add("ssim_input", ssim_in / n);
  res.add("ssim_output", ssim_out / n);
  return res;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"analyze-noise", "variance-map",
                                                 "verify-equivalence", "train", "destripe", "eval"};
  return names;
}

CommandResult run_command(const std::string& name, Config& cfg, const std::string& out_dir) {
  using Fn = CommandResult (*)(Config&, const std::string&);
  static const std::map<std::string, Fn> table = {
      {"analyze-noise", cmd_analyze_noise}, {"variance-map", cmd_variance_map},
      {"verify-equivalence", cmd_verify_equivalence}, {"train", cmd_train},
      {"destripe", cmd_destripe}, {"eval", cmd_eval}};
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError(0, "unknown command '" + name + "'");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  CommandResult res = it->second(cfg, out_dir);
  write_text(path_in(out_dir, "config.resolved.ini"), cfg.resolved());
  write_text(path_in(out_dir, "summary.txt"), res.str());
  return res;
}

}  // namespace fnsup
