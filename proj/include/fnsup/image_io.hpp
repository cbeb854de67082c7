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

#ifndef FNSUP_IMAGE_IO_HPP_
#define FNSUP_IMAGE_IO_HPP_

#include <string>

#include "fnsup/grid.hpp"

namespace fnsup {

enum class ImageFormat { PgmAscii, PgmBinary, Png };

/// Reads a grayscale PGM (P2/P5) or PNG; samples are divided by the
/// format's maximum value so the result lies in [0,1].
ImageGrid image_read(const std::string& path);

/// Writes `grid` clipped to [0,1] and rounded to `depth` bits (8 or 16).
/// The format follows the extension (.pgm -> binary P5, .png) unless given.
void image_write(const std::string& path, const ImageGrid& grid, int depth = 16);
void image_write(const std::string& path, const ImageGrid& grid, int depth, ImageFormat format);

}  // namespace fnsup

#endif  // FNSUP_IMAGE_IO_HPP_
