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

#ifndef FNSUP_PARALLEL_HPP_
#define FNSUP_PARALLEL_HPP_

#include <cstddef>
#include <functional>
#include <vector>

namespace fnsup {

/// 0 means "use hardware concurrency". Results never depend on this value.
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Each index is executed exactly once; the
/// caller is responsible for writing results into per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Evaluates body(i) into slot i and returns the slots; reducing them in index
/// order keeps sums bit-reproducible regardless of thread count.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, F&& body) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = body(i); });
  return out;
}

}  // namespace fnsup

#endif  // FNSUP_PARALLEL_HPP_
