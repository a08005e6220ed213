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

#ifndef SHORTCUT_PATTERN_H_
#define SHORTCUT_PATTERN_H_

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace shortcut {

using Token = std::string;
using TokenSeq = std::vector<Token>;
using LabelId = int;

// A trigger token sequence together with the label it induces in the audited
// model. Patterns compare element-wise on the trigger, then on the label.
struct InferencePattern {
  TokenSeq trigger;
  LabelId label = 0;

  friend auto operator<=>(const InferencePattern&,
                          const InferencePattern&) = default;
  friend bool operator==(const InferencePattern&,
                         const InferencePattern&) = default;
};

// Renders a trigger as ["a", "b"] for logs and markdown.
std::string FormatTrigger(std::span<const Token> trigger);

// True iff `needle` is an order-preserving subsequence of `haystack`.
bool IsSubsequence(std::span<const Token> needle,
                   std::span<const Token> haystack);

nlohmann::json PatternToJson(const InferencePattern& pattern);
InferencePattern PatternFromJson(const nlohmann::json& j);

}  // namespace shortcut

#endif  // SHORTCUT_PATTERN_H_
