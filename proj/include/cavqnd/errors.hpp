// Copyright 2026 The cavqnd Authors
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

#ifndef CAVQND_ERRORS_HPP
#define CAVQND_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace cavqnd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CAVQND_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

// Physical regime violations.
CAVQND_DEFINE_ERROR(StabilityViolation);
CAVQND_DEFINE_ERROR(GeometryViolation);
CAVQND_DEFINE_ERROR(SignViolation);

// Numerical failures.
CAVQND_DEFINE_ERROR(ConvergenceFailure);
CAVQND_DEFINE_ERROR(TruncationTooSmall);

// Operator algebra.
CAVQND_DEFINE_ERROR(UnknownMode);
CAVQND_DEFINE_ERROR(MissingMode);
CAVQND_DEFINE_ERROR(InvalidLayout);
CAVQND_DEFINE_ERROR(InvalidState);
CAVQND_DEFINE_ERROR(NonHermitian);
CAVQND_DEFINE_ERROR(DimensionMismatch);

// Protocol.
CAVQND_DEFINE_ERROR(PhaseAliasing);
CAVQND_DEFINE_ERROR(OutOfRange);
CAVQND_DEFINE_ERROR(UnsupportedBackend);

// Input files.
CAVQND_DEFINE_ERROR(ConfigError);

#undef CAVQND_DEFINE_ERROR

/// Class name of a library error, "Error" for unknown kinds.
inline std::string_view error_kind(const std::exception& e) {
#define CAVQND_KIND(Name) \
  if (dynamic_cast<const Name*>(&e)) return #Name
  CAVQND_KIND(StabilityViolation);
  CAVQND_KIND(GeometryViolation);
  CAVQND_KIND(SignViolation);
  CAVQND_KIND(ConvergenceFailure);
  CAVQND_KIND(TruncationTooSmall);
  CAVQND_KIND(UnknownMode);
  CAVQND_KIND(MissingMode);
  CAVQND_KIND(InvalidLayout);
  CAVQND_KIND(InvalidState);
  CAVQND_KIND(NonHermitian);
  CAVQND_KIND(DimensionMismatch);
  CAVQND_KIND(PhaseAliasing);
  CAVQND_KIND(OutOfRange);
  CAVQND_KIND(UnsupportedBackend);
  CAVQND_KIND(ConfigError);
#undef CAVQND_KIND
  return "Error";
}

}  // namespace cavqnd

#endif  // CAVQND_ERRORS_HPP
