// Copyright 2026 The qoracle Authors
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

#ifndef QORACLE_ERROR_HPP
#define QORACLE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qoracle {

enum class ErrorCode {
  invalid_argument,
  dimension,        // size mismatch or register errors
  resource,         // dimension cap exceeded
  contract,         // caller broke a precondition (too few copies, sequencing)
  numeric,          // corrupted state, probability underflow
  adversary_fault,  // query budget exceeded inside a game
  refused,          // enumeration space too large
  retry_exhausted,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace qoracle

#endif  // QORACLE_ERROR_HPP
