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

#ifndef WTAN_ERROR_HPP_
#define WTAN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace wtan {

// Failure categories shared by every module. The numeric values are mirrored
// by the C API status codes in wtan.h and must stay in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kMarginalMismatch = 3,
  kBaseMismatch = 4,
  kSolverFailure = 5,
  kTooLarge = 6,
  kNonRationalWeights = 7,
  kNonConvergence = 8,
  kMissingVelocities = 9,
  kZeroCost = 10,
  kGridMismatch = 11,
  kNonFiniteField = 12,
  kParse = 13,
  kUnknownExample = 14,
  kBudgetExhausted = 15,
  kInternal = 16,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace wtan

#endif  // WTAN_ERROR_HPP_
