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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fnsup/commands.hpp"
#include "fnsup/parallel.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kIoError = 4 };

const char* describe(const std::string& name) {
  if (name == "analyze-noise") return "Gaussianity and independence of noise Fourier coefficients";
  if (name == "variance-map") return "Empirical and theoretical per-bin variance maps";
  if (name == "verify-equivalence") return "Blurred-penalty curves and Monte-Carlo equivalence gap";
  if (name == "train") return "Train a restoration model on noisy or clean targets";
  if (name == "destripe") return "Unsupervised stripe removal by noise swapping";
  return "Evaluate a saved model on held-out images";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-domain noisy supervision toolkit"};
  app.name("fnsup");
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  app.add_option("--config", config_path, "Experiment config file")->required();
  app.add_option("--out", out_dir, "Output directory (default: [io] out, else fnsup_out)");
  app.add_option("--seed", seed, "Override [io] seed");
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")
      ->check(CLI::NonNegativeNumber);
  app.fallthrough();
  app.require_subcommand(1, 1);
  for (const auto& name : fnsup::command_names()) app.add_subcommand(name, describe(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    fnsup::set_thread_count(threads);
    fnsup::Config cfg = fnsup::Config::load(config_path);
    if (seed) cfg.set("io", "seed", std::to_string(*seed));
    if (out_dir.empty()) out_dir = cfg.get_string("io", "out", "fnsup_out");
    const fnsup::CommandResult res = fnsup::run_command(command, cfg, out_dir);
    std::cout << res.str();
    return kOk;
  } catch (const fnsup::ConfigError& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const fnsup::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const fnsup::UnsupportedFormat& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const fnsup::CorruptHeader& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const fnsup::DivergenceDetected& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
