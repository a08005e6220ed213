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

#include "shortcut/pattern.h"

#include "shortcut/errors.h"

namespace shortcut {

std::string FormatTrigger(std::span<const Token> trigger) {
  std::string out = "[";
  for (size_t i = 0; i < trigger.size(); ++i) {
    if (i > 0) out += ", ";
    out += nlohmann::json(trigger[i]).dump();
  }
  out += "]";
  return out;
}

bool IsSubsequence(std::span<const Token> needle,
                   std::span<const Token> haystack) {
  size_t matched = 0;
  for (const Token& token : haystack) {
    if (matched == needle.size()) break;
    if (token == needle[matched]) ++matched;
  }
  return matched == needle.size();
}

nlohmann::json PatternToJson(const InferencePattern& pattern) {
  return {{"trigger", pattern.trigger}, {"label", pattern.label}};
}

InferencePattern PatternFromJson(const nlohmann::json& j) {
  InferencePattern pattern;
  try {
    pattern.trigger = j.at("trigger").get<TokenSeq>();
    pattern.label = j.at("label").get<LabelId>();
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorKind::kLoad,
                     std::string("malformed pattern record: ") + e.what());
  }
  if (pattern.trigger.empty()) {
    throw AuditError(ErrorKind::kLoad, "pattern with empty trigger");
  }
  return pattern;
}

}  // namespace shortcut
