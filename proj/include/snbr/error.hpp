// Copyright 2026 The snbr Authors
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

#ifndef SNBR_ERROR_HPP_
#define SNBR_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace snbr {

enum class ErrorCode {
  kInvalidArgument,
  kNumericFailure,
  kStepCeiling,
  kInfeasible,
  kUnbounded,
  kIterLimit,
  kPreflight,
  kParse,
  kIo,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by iterative estimators that stop before reaching tolerance.
class NumericFailure : public Error {
 public:
  NumericFailure(const std::string& what, double estimate)
      : Error(ErrorCode::kNumericFailure, what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

[[noreturn]] void throw_invalid(const std::string& what);

}  // namespace snbr

#endif  // SNBR_ERROR_HPP_
