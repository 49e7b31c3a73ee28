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

#include "qoracle/error.hpp"

namespace qoracle {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::resource: return "resource";
    case ErrorCode::contract: return "contract";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::adversary_fault: return "adversary_fault";
    case ErrorCode::refused: return "refused";
    case ErrorCode::retry_exhausted: return "retry_exhausted";
  }
  return "unknown";
}

}  // namespace qoracle
