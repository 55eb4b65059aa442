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

#ifndef BRANCHLOC_ERRORS_H_
#define BRANCHLOC_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace branchloc {

// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kDomain,         // argument outside the mathematical domain of an op
  kSpec,           // criterion specification violates its invariants
  kInput,          // malformed or inconsistent input data
  kConfig,         // project configuration schema violation
  kGate,           // comparison matrix failed the consistency gate
  kNumerical,      // iterative method did not converge
  kSolverRefusal,  // solver declined the instance (size cap)
  kIo,             // filesystem read/write failure
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string& message);

}  // namespace branchloc

#endif  // BRANCHLOC_ERRORS_H_
