// Copyright 2026 The ksynergy Authors
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

#include "ksyn/error.hpp"

namespace ksyn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kEmptyDemo: return "EmptyDemo";
    case ErrorCode::kNonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::kDegenerateComponent: return "DegenerateComponent";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kDegenerateCloud: return "DegenerateCloud";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kUnknownTask: return "UnknownTask";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace ksyn
