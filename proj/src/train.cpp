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

#include "fnsup/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fnsup/metrics.hpp"
#include "fnsup/parallel.hpp"

namespace fnsup {

namespace {

struct Crop {
  Eigen::Index u = 0, v = 0, size_u = 0, size_v = 0;
  ImageGrid apply(const ImageGrid& img) const { return img.block(u, v, size_u, size_v); }
};

Crop draw_crop(std::mt19937_64& eng, Eigen::Index U, Eigen::Index V, int patch) {
  if (patch <= 0 || (patch >= U && patch >= V)) return {0, 0, U, V};
  const Eigen::Index pu = std::min<Eigen::Index>(patch, U), pv = std::min<Eigen::Index>(patch, V);
  std::uniform_int_distribution<Eigen::Index> du(0, U - pu), dv(0, V - pv);
  const Eigen::Index u = du(eng);
  return {u, dv(eng), pu, pv};
}

struct Contribution {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

Eigen::VectorXd reduce(const std::vector<Contribution>& parts, double& loss) {
  Eigen::VectorXd g = parts.front().grad;
  loss = parts.front().loss;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    g += parts[i].grad;
    loss += parts[i].loss;
  }
  return g;
}

}  // namespace

double heldout_psnr(const Model& model, const std::vector<Example>& heldout) {
  if (heldout.empty()) return 0.0;
  const auto vals = parallel_map<double>(heldout.size(), [&](std::size_t i) {
    return psnr(model.forward(heldout[i].x), heldout[i].z, 1.0);
  });
  double s = 0.0;
  for (double v : vals) s += v;
  return s / static_cast<double>(vals.size());
}

TrainResult train(Model& model, const std::vector<Example>& data,
                  const std::vector<Example>& heldout, const TrainConfig& config) {
  if (data.empty()) throw InvalidParam("train: empty dataset");
  if (config.epochs < 0 || config.batch_size < 1) throw InvalidParam("train: epochs/batch size");
  if (!(config.optimizer.lr >= 0.0)) throw InvalidParam("train: negative learning rate");
  const Eigen::Index U = data.front().x.rows(), V = data.front().x.cols();
  if (config.patch_size > U || config.patch_size > V) {
    throw InvalidParam("train: patch size exceeds image size");
  }
  for (const auto& ex : data) {
    require_same_shape(ex.x, data.front().x, "train example");
    require_same_shape(ex.x, config.target == TargetMode::Clean ? ex.z : ex.y, "train target");
  }
  RngSeed root{config.seed, 0x7472616eULL};
  auto eng = root.engine();
  Optimizer opt(config.optimizer);
  const std::size_t n = data.size();
  const std::size_t B = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), n);
  const long per_epoch = static_cast<long>((n + B - 1) / B);
  const long total_steps = per_epoch * config.epochs;
  long step = 0;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  TrainResult result;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), eng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += B) {
      const std::size_t m = std::min(B, n - start);
      std::vector<Crop> crops(m);
      for (auto& c : crops) c = draw_crop(eng, U, V, config.patch_size);
      const auto parts = parallel_map<Contribution>(m, [&](std::size_t b) {
        const Example& ex = data[perm[start + b]];
        const ImageGrid x = crops[b].apply(ex.x);
        const ImageGrid t = crops[b].apply(config.target == TargetMode::Clean ? ex.z : ex.y);
        const ImageGrid f = model.forward(x);
        return Contribution{loss_eval(config.loss, f, t),
                            model.backward(x, loss_grad(config.loss, f, t))};
      });
      double batch_loss = 0.0;
      const Eigen::VectorXd grad = reduce(parts, batch_loss);
      if (!std::isfinite(batch_loss) || !grad.allFinite()) {
        throw DivergenceDetected(epoch, "training loss became non-finite at epoch " +
                                            std::to_string(epoch));
      }
      epoch_loss += batch_loss;
      opt.step(model.params(), grad,
               scheduled_lr(config.optimizer.lr, config.schedule, step, total_steps));
      model.project();
      ++step;
      if (!model.params().allFinite()) {
        throw DivergenceDetected(epoch, "parameters became non-finite at epoch " +
                                            std::to_string(epoch));
      }
    }
    const double psnr_now = heldout_psnr(model, heldout);
    if (!heldout.empty() && !std::isfinite(psnr_now)) {
      throw DivergenceDetected(epoch, "held-out outputs became non-finite at epoch " +
                                          std::to_string(epoch));
    }
    result.curve.push_back({epoch, epoch_loss / static_cast<double>(n), psnr_now});
  }
  return result;
}

ImageGrid usr_synthesize(const Model& model, const ImageGrid& yi, const ImageGrid& yj,
                         double epsilon) {
  require_same_shape(yi, yj, "usr_synthesize");
  return model.forward(yi) + epsilon * (yj - model.forward(yj));
}

std::vector<UsrRecord> usr_train(const std::vector<ImageGrid>& noisy, Model& model,
                                 const UsrConfig& config, const std::vector<Example>& heldout) {
  if (noisy.size() < 2) throw NeedAtLeastTwoImages("usr_train: need at least two noisy images");
  if (!(config.epsilon > 1.0)) {
    throw InvalidParam("usr_train: amplification epsilon must be > 1, got " +
                       std::to_string(config.epsilon));
  }
  if (config.steps < 0 || config.batch_size < 1) throw InvalidParam("usr_train: steps/batch size");
  if (!(config.optimizer.lr >= 0.0)) throw InvalidParam("usr_train: negative learning rate");
  const Eigen::Index U = noisy.front().rows(), V = noisy.front().cols();
  for (const auto& y : noisy) require_same_shape(y, noisy.front(), "usr_train image");
  const LossSpec loss = LossSpec::fourier_k0(config.phi);
  RngSeed root{config.seed, 0x757372ULL};
  auto eng = root.engine();
  Optimizer opt(config.optimizer);

  // Pairs come from a shuffled pass over the images; a fresh shuffle starts
  // whenever fewer than two unused indices remain.
  std::vector<std::size_t> perm(noisy.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t cursor = perm.size();
  auto next_pair = [&] {
    if (cursor + 2 > perm.size()) {
      std::shuffle(perm.begin(), perm.end(), eng);
      cursor = 0;
    }
    const std::pair<std::size_t, std::size_t> p{perm[cursor], perm[cursor + 1]};
    cursor += 2;
    return p;
  };

  std::vector<UsrRecord> log;
  double window = 0.0;
  int window_n = 0;
  for (int step = 1; step <= config.steps; ++step) {
    const std::size_t B = static_cast<std::size_t>(config.batch_size);
    std::vector<std::pair<std::size_t, std::size_t>> pairs(B);
    std::vector<Crop> crops(B);
    for (std::size_t b = 0; b < B; ++b) {
      pairs[b] = next_pair();
      crops[b] = draw_crop(eng, U, V, config.patch_size);
    }
    const auto parts = parallel_map<Contribution>(B, [&](std::size_t b) {
      const ImageGrid yi = crops[b].apply(noisy[pairs[b].first]);
      const ImageGrid yj = crops[b].apply(noisy[pairs[b].second]);
      // Stop-gradient: x~ is a constant for this step.
      const ImageGrid xt = usr_synthesize(model, yi, yj, config.epsilon);
      const ImageGrid f = model.forward(xt);
      return Contribution{loss_eval(loss, f, yi), model.backward(xt, loss_grad(loss, f, yi))};
    });
    double batch_loss = 0.0;
    const Eigen::VectorXd grad = reduce(parts, batch_loss);
    if (!std::isfinite(batch_loss) || !grad.allFinite()) {
      throw DivergenceDetected(step, "USR loss became non-finite at step " + std::to_string(step));
    }
    opt.step(model.params(), grad, config.optimizer.lr);
    model.project();
    window += batch_loss / static_cast<double>(B);
    ++window_n;
    if (config.log_every > 0 && (step % config.log_every == 0 || step == config.steps)) {
      log.push_back({step, window / window_n, heldout_psnr(model, heldout)});
      window = 0.0;
      window_n = 0;
    }
  }
  return log;
}

}  // namespace fnsup
