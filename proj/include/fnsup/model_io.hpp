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

#ifndef FNSUP_MODEL_IO_HPP_
#define FNSUP_MODEL_IO_HPP_

#include <memory>
#include <string>

#include "fnsup/models.hpp"

namespace fnsup {

/// Binary container, all integers little-endian:
///   "FNSM" | u32 version | u32 kind | u64 U | u64 V | u32 layer count |
///   per layer: u32 size, u32 in, u32 out | u64 parameter count |
///   f64 parameters in declaration order.
/// U and V are zero for ConvNet models; SpectralDiagonal has no layers.
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string model_serialize(const Model& model);
std::unique_ptr<Model> model_deserialize(const std::string& bytes);

void model_save(const std::string& path, const Model& model);
std::unique_ptr<Model> model_load(const std::string& path);

}  // namespace fnsup

#endif  // FNSUP_MODEL_IO_HPP_
