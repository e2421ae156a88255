// Copyright 2026 The Chronolace Authors
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

#ifndef CHRONOLACE_ERRORS_HPP_
#define CHRONOLACE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace chronolace {

/// Base class for every error raised by the library. `kind()` returns the
/// stable error-type name used in structured (JSON) error reports.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define CHRONOLACE_DECLARE_ERROR(NAME)                            \
  class NAME : public Error {                                     \
   public:                                                        \
    using Error::Error;                                           \
    const char* kind() const noexcept override { return #NAME; }  \
  }

// Bad configuration or malformed input.
CHRONOLACE_DECLARE_ERROR(ConfigError);
CHRONOLACE_DECLARE_ERROR(DomainError);
CHRONOLACE_DECLARE_ERROR(InvalidChoiceError);
CHRONOLACE_DECLARE_ERROR(UnsupportedError);
CHRONOLACE_DECLARE_ERROR(ModelValidationError);
CHRONOLACE_DECLARE_ERROR(InconsistentEvidenceError);
CHRONOLACE_DECLARE_ERROR(ProgramError);
CHRONOLACE_DECLARE_ERROR(PhaseDisciplineError);

// Physics or numerics refused to produce a result.
CHRONOLACE_DECLARE_ERROR(WeakFieldDomainError);
CHRONOLACE_DECLARE_ERROR(CurvatureTooStrongError);
CHRONOLACE_DECLARE_ERROR(NumericalError);
CHRONOLACE_DECLARE_ERROR(SolverError);
CHRONOLACE_DECLARE_ERROR(GeometryError);
CHRONOLACE_DECLARE_ERROR(NoEchoError);

#undef CHRONOLACE_DECLARE_ERROR

}  // namespace chronolace

#endif  // CHRONOLACE_ERRORS_HPP_
