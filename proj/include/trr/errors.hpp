// Copyright 2026 The trr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRR_ERRORS_HPP
#define TRR_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A multi-index component, mode number or offset is out of range.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Two operands have incompatible shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content (TRT1, TRC1, PPM, spec documents).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input or a failed decomposition.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An ADMM iterate became non-finite.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : NumericalError(what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace trr

#endif  // TRR_ERRORS_HPP
