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

// E(w): the examples of a corpus whose token sequence contains a trigger w.
//
// Containment is an order-preserving subsequence match with gaps: every
// trigger token consumes a distinct position, left to right. A contiguous
// mode requires the trigger to appear as an unbroken run instead.

#ifndef SHORTCUT_MATCH_INDEX_H_
#define SHORTCUT_MATCH_INDEX_H_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "shortcut/corpus.h"

namespace shortcut {

enum class MatchMode { kSubsequence, kContiguous };

bool ContainsTrigger(std::span<const Token> tokens,
                     std::span<const Token> trigger);
bool ContainsContiguous(std::span<const Token> tokens,
                        std::span<const Token> trigger);
bool Contains(std::span<const Token> tokens, std::span<const Token> trigger,
              MatchMode mode);

struct MatchSet {
  TokenSeq trigger;
  // Corpus positions (example ordinals), ascending.
  std::vector<uint32_t> examples;
  Split split = Split::kIid;

  size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

// Example ids of a match set, in the same order.
std::vector<std::string> MatchIds(const MatchSet& matches,
                                  const Corpus& corpus);

// Immutable inverted index from token to the examples and positions where it
// occurs. Safe for concurrent FindMatches after construction.
class TriggerIndex {
 public:
  struct Posting {
    uint32_t example;
    std::vector<uint32_t> positions;  // ascending
  };

  static TriggerIndex Build(const Corpus& corpus);

  // Equals {x in corpus : Contains(x.tokens, trigger, mode)}. Tokens absent
  // from the corpus yield an empty set. Throws kContract on an empty trigger.
  MatchSet FindMatches(std::span<const Token> trigger,
                       MatchMode mode = MatchMode::kSubsequence) const;

  // Empty span for unseen tokens; postings are sorted by example.
  std::span<const Posting> Postings(const Token& token) const;
  size_t DocumentFrequency(const Token& token) const {
    return Postings(token).size();
  }
  size_t corpus_size() const { return corpus_size_; }
  Split split() const { return split_; }
  size_t vocabulary_size() const { return postings_.size(); }

 private:
  std::unordered_map<Token, std::vector<Posting>> postings_;
  size_t corpus_size_ = 0;
  Split split_ = Split::kIid;
};

}  // namespace shortcut

#endif  // SHORTCUT_MATCH_INDEX_H_
