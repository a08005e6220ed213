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

#include "shortcut/errors.h"

namespace shortcut {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kLoad:
      return "load";
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kContract:
      return "contract";
    case ErrorKind::kTransport:
      return "transport";
    case ErrorKind::kProtocol:
      return "protocol";
    case ErrorKind::kUndefinedStat:
      return "undefined-stat";
  }
  return "unknown";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTransport:
      return 3;
    default:
      return 2;
  }
}

}  // namespace shortcut
