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

#include "shortcut/match_index.h"

#include <algorithm>
#include <map>

#include "shortcut/errors.h"

namespace shortcut {

bool ContainsTrigger(std::span<const Token> tokens,
                     std::span<const Token> trigger) {
  return IsSubsequence(trigger, tokens);
}

bool ContainsContiguous(std::span<const Token> tokens,
                        std::span<const Token> trigger) {
  if (trigger.size() > tokens.size()) return false;
  return std::search(tokens.begin(), tokens.end(), trigger.begin(),
                     trigger.end()) != tokens.end();
}

bool Contains(std::span<const Token> tokens, std::span<const Token> trigger,
              MatchMode mode) {
  return mode == MatchMode::kSubsequence ? ContainsTrigger(tokens, trigger)
                                         : ContainsContiguous(tokens, trigger);
}

std::vector<std::string> MatchIds(const MatchSet& matches,
                                  const Corpus& corpus) {
  std::vector<std::string> ids;
  ids.reserve(matches.size());
  for (uint32_t i : matches.examples) ids.push_back(corpus.examples.at(i).id);
  return ids;
}

TriggerIndex TriggerIndex::Build(const Corpus& corpus) {
  if (!corpus.empty() && !corpus.tokenized()) {
    throw AuditError(ErrorKind::kContract, "index needs a tokenized corpus");
  }
  TriggerIndex index;
  index.corpus_size_ = corpus.size();
  index.split_ = corpus.split;
  for (uint32_t e = 0; e < corpus.size(); ++e) {
    const TokenSeq& tokens = corpus.examples[e].tokens;
    for (uint32_t p = 0; p < tokens.size(); ++p) {
      auto& list = index.postings_[tokens[p]];
      if (list.empty() || list.back().example != e) list.push_back({e, {}});
      list.back().positions.push_back(p);
    }
  }
  return index;
}

std::span<const TriggerIndex::Posting> TriggerIndex::Postings(
    const Token& token) const {
  auto it = postings_.find(token);
  if (it == postings_.end()) return {};
  return it->second;
}

namespace {

struct TermView {
  const Token* token;
  size_t multiplicity;
  std::span<const TriggerIndex::Posting> postings;
};

// Positions of `token` inside example `e`, or nullptr. Binary search over
// the example-sorted posting list.
const std::vector<uint32_t>* PositionsIn(
    std::span<const TriggerIndex::Posting> postings, uint32_t e) {
  auto it = std::lower_bound(
      postings.begin(), postings.end(), e,
      [](const TriggerIndex::Posting& p, uint32_t v) { return p.example < v; });
  if (it == postings.end() || it->example != e) return nullptr;
  return &it->positions;
}

// Greedy left-to-right placement using positions only: each trigger token
// takes its first occurrence after the previous one.
bool VerifySubsequence(const std::vector<const std::vector<uint32_t>*>& slots) {
  int64_t cursor = -1;
  for (const auto* positions : slots) {
    auto it = std::upper_bound(positions->begin(), positions->end(), cursor);
    if (it == positions->end()) return false;
    cursor = *it;
  }
  return true;
}

bool VerifyContiguous(const std::vector<const std::vector<uint32_t>*>& slots) {
  for (uint32_t start : *slots.front()) {
    bool ok = true;
    for (size_t k = 1; k < slots.size() && ok; ++k) {
      ok = std::binary_search(slots[k]->begin(), slots[k]->end(),
                              start + static_cast<uint32_t>(k));
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

MatchSet TriggerIndex::FindMatches(std::span<const Token> trigger,
                                   MatchMode mode) const {
  if (trigger.empty()) {
    throw AuditError(ErrorKind::kContract, "trigger must be non-empty");
  }
  MatchSet result;
  result.trigger.assign(trigger.begin(), trigger.end());
  result.split = split_;

  std::map<Token, size_t> counts;
  for (const Token& t : trigger) ++counts[t];
  std::vector<TermView> terms;
  terms.reserve(counts.size());
  for (const auto& [token, k] : counts) {
    auto postings = Postings(token);
    if (postings.empty()) return result;
    terms.push_back({&token, k, postings});
  }
  // Rarest term drives candidate generation.
  std::sort(terms.begin(), terms.end(), [](const TermView& a, const TermView& b) {
    return a.postings.size() < b.postings.size();
  });

  std::vector<const std::vector<uint32_t>*> slots(trigger.size());
  for (const auto& lead : terms.front().postings) {
    if (lead.positions.size() < terms.front().multiplicity) continue;
    bool candidate = true;
    for (size_t t = 1; t < terms.size() && candidate; ++t) {
      const auto* pos = PositionsIn(terms[t].postings, lead.example);
      candidate = pos && pos->size() >= terms[t].multiplicity;
    }
    if (!candidate) continue;
    for (size_t i = 0; i < trigger.size(); ++i) {
      slots[i] = PositionsIn(Postings(trigger[i]), lead.example);
    }
    const bool ok = mode == MatchMode::kSubsequence ? VerifySubsequence(slots)
                                                    : VerifyContiguous(slots);
    if (ok) result.examples.push_back(lead.example);
  }
  return result;
}

}  // namespace shortcut
