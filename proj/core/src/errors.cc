// Copyright 2026 The Authors.
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

#include "branchloc/errors.h"

namespace branchloc {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain:
      return "domain error";
    case ErrorKind::kSpec:
      return "specification error";
    case ErrorKind::kInput:
      return "input error";
    case ErrorKind::kConfig:
      return "config error";
    case ErrorKind::kGate:
      return "consistency gate failure";
    case ErrorKind::kNumerical:
      return "numerical error";
    case ErrorKind::kSolverRefusal:
      return "solver refusal";
    case ErrorKind::kIo:
      return "I/O error";
  }
  return "error";
}

void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace branchloc
