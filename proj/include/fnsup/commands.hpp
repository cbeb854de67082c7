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

#ifndef FNSUP_COMMANDS_HPP_
#define FNSUP_COMMANDS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "fnsup/config.hpp"
#include "fnsup/noise.hpp"

namespace fnsup {

/// Ordered `key = value` lines; also written to summary.txt.
struct CommandResult {
  std::vector<std::pair<std::string, std::string>> summary;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  /// Throws InvalidParam when the key is absent.
  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  std::string str() const;
};

/// Builds the NoiseSpec described by `section`. Signal-dependent families
/// take `reference` = a constant level (default 0.5) or "procedural".
NoiseSpec noise_from_config(Config& cfg, const std::string& section, Eigen::Index U,
                            Eigen::Index V, std::uint64_t seed);

CommandResult cmd_analyze_noise(Config& cfg, const std::string& out_dir);
CommandResult cmd_variance_map(Config& cfg, const std::string& out_dir);
CommandResult cmd_verify_equivalence(Config& cfg, const std::string& out_dir);
CommandResult cmd_train(Config& cfg, const std::string& out_dir);
CommandResult cmd_destripe(Config& cfg, const std::string& out_dir);
CommandResult cmd_eval(Config& cfg, const std::string& out_dir);

const std::vector<std::string>& command_names();

/// Creates `out_dir`, runs the named command, then writes
/// config.resolved.ini and summary.txt next to its outputs.
CommandResult run_command(const std::string& name, Config& cfg, const std::string& out_dir);

}  // namespace fnsup

#endif  // FNSUP_COMMANDS_HPP_
