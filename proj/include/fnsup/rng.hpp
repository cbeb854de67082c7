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

#ifndef FNSUP_RNG_HPP_
#define FNSUP_RNG_HPP_

#include <cstdint>
#include <random>

namespace fnsup {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// (seed, stream) pair. Equal pairs give bit-identical draws; distinct streams
/// are statistically independent for practical purposes.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Child stream i, e.g. one per Monte-Carlo realization or per side of a
  /// training pair.
  RngSeed split(std::uint64_t i) const {
    return {seed, splitmix64(stream ^ splitmix64(i + 0x632be59bd9b4e019ULL))};
  }

  std::mt19937_64 engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
  }

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

}  // namespace fnsup

#endif  // FNSUP_RNG_HPP_
