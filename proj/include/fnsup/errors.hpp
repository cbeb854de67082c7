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

#ifndef FNSUP_ERRORS_HPP_
#define FNSUP_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fnsup {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HermitianViolation : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidParam : public Error {
 public:
  using Error::Error;
};

class InvalidBin : public Error {
 public:
  using Error::Error;
};

class ConjugatePairRejected : public Error {
 public:
  using Error::Error;
};

class NonDifferentiable : public Error {
 public:
  using Error::Error;
};

class NeedAtLeastTwoImages : public Error {
 public:
  using Error::Error;
};

/// Raised by the training loops when the loss stops being finite.
class DivergenceDetected : public Error {
 public:
  DivergenceDetected(int epoch, const std::string& what)
      : Error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

class CorruptHeader : public Error {
 public:
  CorruptHeader(std::size_t offset, const std::string& what)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Config problems carry the 1-based line they were detected on (0 when the
/// problem is not tied to a line, e.g. a missing key).
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace fnsup

#endif  // FNSUP_ERRORS_HPP_
