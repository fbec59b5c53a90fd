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

#include "maopt/error.hpp"

namespace maopt {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonIntegerIndexSpacing: return "NonIntegerIndexSpacing";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InfeasibleGeometry: return "InfeasibleGeometry";
    case ErrorCode::InfeasibleInitial: return "InfeasibleInitial";
    case ErrorCode::LayoutDoesNotFit: return "LayoutDoesNotFit";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::ZeroChannel: return "ZeroChannel";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_config_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonIntegerIndexSpacing:
    case ErrorCode::InvalidGeometry:
    case ErrorCode::InfeasibleGeometry:
    case ErrorCode::LayoutDoesNotFit:
    case ErrorCode::SearchSpaceTooLarge:
    case ErrorCode::InvalidConfig:
    case ErrorCode::UnknownPreset:
      return true;
    default:
      return false;
  }
}

}  // namespace maopt
