// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace maopt {

enum class ErrorCode {
  // geometry / indexing
  NonIntegerIndexSpacing,
  InvalidGeometry,
  IndexOutOfRange,
  InfeasibleGeometry,
  InfeasibleInitial,
  LayoutDoesNotFit,
  // numerics
  SingularSystem,
  BracketFailure,
  ZeroChannel,
  SearchSpaceTooLarge,
  InvariantViolation,
  // configuration
  InvalidConfig,
  UnknownPreset,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// True for errors caused by bad user input (CLI exit code 2) rather than a
/// numeric failure during a run (exit code 3).
bool is_config_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace maopt
