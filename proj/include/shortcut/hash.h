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

#ifndef SHORTCUT_HASH_H_
#define SHORTCUT_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace shortcut {

// 64-bit FNV-1a. Used for content fingerprints in run metadata, not security.
class Fingerprint {
 public:
  void Update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }
  // Length-prefixed so that ("ab","c") and ("a","bc") differ.
  void UpdateField(std::string_view bytes) {
    Update(std::to_string(bytes.size()));
    Update(":");
    Update(bytes);
  }
  uint64_t value() const { return state_; }
  std::string Hex() const;

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace shortcut

#endif  // SHORTCUT_HASH_H_
