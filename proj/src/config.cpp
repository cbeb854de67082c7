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

#include "fnsup/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fnsup {

namespace {

const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"io",
       {"seed", "out", "dataset", "image_dir", "train_images", "test_images", "image_size",
        "complexity", "write_images", "bit_depth"}},
      {"noise",
       {"family", "sigma", "halfwidth", "scale", "peak", "alpha", "beta", "kernel", "kernel_size",
        "inner", "inner_sigma", "inner_halfwidth", "inner_scale", "axis", "components", "parts",
        "reference", "height", "width"}},
      {"input_noise",
       {"family", "sigma", "halfwidth", "scale", "peak", "alpha", "beta", "kernel", "kernel_size",
        "inner", "inner_sigma", "inner_halfwidth", "inner_scale", "axis", "components", "parts",
        "reference"}},
      {"analysis",
       {"M", "bins", "skew_threshold", "kurt_threshold", "ks_scale", "sparsity_p",
        "histogram_bins", "pixel"}},
      {"equivalence",
       {"penalty", "delta", "q", "curve_sigma", "t_min", "t_max", "points", "residual_rms", "M",
        "map"}},
      {"train",
       {"model", "layers", "kernel", "channels", "loss", "penalty", "delta", "q", "optimizer",
        "lr", "beta1", "beta2", "eps", "schedule", "epochs", "patch_size", "batch_size", "target",
        "probe_bins", "init_seed"}},
      {"usr",
       {"epsilon", "steps", "batch_size", "patch_size", "optimizer", "lr", "beta1", "beta2", "eps",
        "penalty", "delta", "q", "layers", "kernel", "channels", "log_every", "init_seed"}},
      {"eval", {"model", "peak"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string base_section(const std::string& name) {
  const auto dot = name.find('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

}  // namespace

const std::vector<std::string>& config_schema(const std::string& section) {
  const auto it = schema().find(base_section(section));
  static const std::vector<std::string> empty;
  return it == schema().end() ? empty : it->second;
}

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "unterminated section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      const std::string base = base_section(section);
      if (!schema().count(base) || (base != section && base != "noise")) {
        throw ConfigError(line, "unknown section [" + section + "]");
      }
      if (c.section_lines_.count(section)) {
        throw ConfigError(line, "duplicate section [" + section + "]");
      }
      c.section_lines_[section] = line;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key = value, got '" + s + "'");
    if (section.empty()) throw ConfigError(line, "key outside of any section");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    const auto& allowed = config_schema(section);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(line, "unknown key '" + key + "' in [" + section + "]");
    }
    if (c.values_[section].count(key)) {
      throw ConfigError(line, "duplicate key '" + key + "' in [" + section + "]");
    }
    c.values_[section][key] = {value, line};
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  if (s == values_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

bool Config::has_section(const std::string& section) const {
  return section_lines_.count(section) > 0 || values_.count(section) > 0;
}

int Config::line_of(const std::string& section, const std::string& key) const {
  if (const Entry* e = find(section, key)) return e->line;
  const auto it = section_lines_.find(section);
  return it == section_lines_.end() ? 0 : it->second;
}

void Config::bad_value(const std::string& section, const std::string& key,
                       const std::string& expected) const {
  const Entry* e = find(section, key);
  throw ConfigError(line_of(section, key), "key '" + key + "' in [" + section + "]: expected " +
                                               expected + ", got '" + (e ? e->value : "") + "'");
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  const auto& allowed = config_schema(section);
  if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
    throw ConfigError(0, "unknown key '" + key + "' in [" + section + "]");
  }
  values_[section][key] = {value, 0};
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) {
  const Entry* e = find(section, key);
  const std::string v = e ? e->value : fallback;
  resolved_[section][key] = v;
  return v;
}

std::string Config::require_string(const std::string& section, const std::string& key) {
  if (!find(section, key)) {
    throw ConfigError(line_of(section, key), "missing key '" + key + "' in [" + section + "]");
  }
  return get_string(section, key, "");
}

namespace {

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double Config::get_double(const std::string& section, const std::string& key, double fallback) {
  const Entry* e = find(section, key);
  double v = fallback;
  if (e && !parse_double(e->value, v)) bad_value(section, key, "a number");
  resolved_[section][key] = e ? e->value : format_double(fallback);
  return v;
}

double Config::require_double(const std::string& section, const std::string& key) {
  if (!find(section, key)) {
    throw ConfigError(line_of(section, key), "missing key '" + key + "' in [" + section + "]");
  }
  return get_double(section, key, 0.0);
}

long long Config::get_int(const std::string& section, const std::string& key, long long fallback) {
  const Entry* e = find(section, key);
  long long v = fallback;
  if (e) {
    const char* end = e->value.data() + e->value.size();
    auto [p, ec] = std::from_chars(e->value.data(), end, v);
    if (e->value.empty() || ec != std::errc() || p != end) bad_value(section, key, "an integer");
  }
  resolved_[section][key] = e ? e->value : std::to_string(fallback);
  return v;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key,
                              std::uint64_t fallback) {
  const Entry* e = find(section, key);
  std::uint64_t v = fallback;
  if (e) {
    const char* end = e->value.data() + e->value.size();
    auto [p, ec] = std::from_chars(e->value.data(), end, v);
    if (e->value.empty() || ec != std::errc() || p != end) {
      bad_value(section, key, "an unsigned 64-bit integer");
    }
  }
  resolved_[section][key] = e ? e->value : std::to_string(fallback);
  return v;
}

std::vector<Bin> Config::get_bins(const std::string& section, const std::string& key,
                                  const std::vector<Bin>& fallback) {
  const Entry* e = find(section, key);
  std::vector<Bin> out = fallback;
  if (e) {
    out.clear();
    std::istringstream in(e->value);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto colon = item.find(':');
      double k = 0, l = 0;
      if (colon == std::string::npos || !parse_double(trim(item.substr(0, colon)), k) ||
          !parse_double(trim(item.substr(colon + 1)), l) || k != static_cast<int>(k) ||
          l != static_cast<int>(l)) {
        bad_value(section, key, "a list like '5:7, 0:8'");
      }
      out.push_back({static_cast<int>(k), static_cast<int>(l)});
    }
  }
  std::string text;
  for (std::size_t i = 0; i < out.size(); ++i) {
    text += (i ? ", " : "") + std::to_string(out[i].k) + ":" + std::to_string(out[i].l);
  }
  resolved_[section][key] = text;
  return out;
}

std::string Config::resolved() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [section, keys] : resolved_) {
    if (!first) os << "\n";
    first = false;
    os << "[" << section << "]\n";
    for (const auto& [k, v] : keys) os << k << " = " << v << "\n";
  }
  return os.str();
}

std::vector<std::string> Config::subsections(const std::string& parent) const {
  std::vector<std::string> out;
  for (const auto& [name, line] : section_lines_) {
    if (name.rfind(parent + ".", 0) == 0) out.push_back(name);
  }
  return out;
}

}  // namespace fnsup
