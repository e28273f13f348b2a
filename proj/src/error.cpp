// Copyright 2026 The wtan Authors
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

#include "wtan/error.hpp"

namespace wtan {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kMarginalMismatch: return "MarginalMismatch";
    case ErrorCode::kBaseMismatch: return "BaseMismatch";
    case ErrorCode::kSolverFailure: return "SolverFailure";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kNonRationalWeights: return "NonRationalWeights";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kMissingVelocities: return "MissingVelocities";
    case ErrorCode::kZeroCost: return "ZeroCost";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kNonFiniteField: return "NonFiniteField";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kUnknownExample: return "UnknownExample";
    case ErrorCode::kBudgetExhausted: return "BudgetExhausted";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace wtan
