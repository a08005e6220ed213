// Copyright 2026 The Shortcut Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHORTCUT_ERRORS_H_
#define SHORTCUT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace shortcut {

enum class ErrorKind {
  kLoad,           // malformed input file
  kConfig,         // invalid configuration or thresholds
  kContract,       // violated precondition
  kTransport,      // model endpoint unreachable; retryable
  kProtocol,       // model endpoint answered with a malformed payload
  kUndefinedStat,  // metric requested over an empty match set
};

const char* ErrorKindName(ErrorKind kind);

class AuditError : public std::runtime_error {
 public:
  AuditError(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit code for an error escaping to the CLI: 2 for configuration and
// contract problems, 3 for adapter transport failures.
int ExitCodeFor(ErrorKind kind);

}  // namespace shortcut

#endif  // SHORTCUT_ERRORS_H_
