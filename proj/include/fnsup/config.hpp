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

#ifndef FNSUP_CONFIG_HPP_
#define FNSUP_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fnsup/errors.hpp"
#include "fnsup/grid.hpp"

namespace fnsup {

/// Flat `key = value` file with `[section]` headers and `#` comments.
/// Sections and keys are checked against a fixed schema when parsing; typed
/// getters record every value they hand out (defaults included) so that the
/// resolved configuration can be echoed next to the outputs.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback);
  std::string require_string(const std::string& section, const std::string& key);
  double get_double(const std::string& section, const std::string& key, double fallback);
  double require_double(const std::string& section, const std::string& key);
  long long get_int(const std::string& section, const std::string& key, long long fallback);
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback);
  std::vector<Bin> get_bins(const std::string& section, const std::string& key,
                            const std::vector<Bin>& fallback);

  /// Overrides (or inserts) a value, e.g. from a command-line flag.
  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Line a key was read from, else the section header line, else 0.
  int line_of(const std::string& section, const std::string& key) const;

  /// Every value handed out so far, sorted by section and key.
  std::string resolved() const;

  /// Sub-sections of `parent`, i.e. sections named "parent.<name>".
  std::vector<std::string> subsections(const std::string& parent) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, std::map<std::string, Entry>> values_;
  std::map<std::string, int> section_lines_;
  std::map<std::string, std::map<std::string, std::string>> resolved_;

  const Entry* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void bad_value(const std::string& section, const std::string& key,
                              const std::string& expected) const;
};

/// Allowed keys for a section name ("noise.<name>" sections share the
/// schema of "noise").
const std::vector<std::string>& config_schema(const std::string& section);

}  // namespace fnsup

#endif  // FNSUP_CONFIG_HPP_
