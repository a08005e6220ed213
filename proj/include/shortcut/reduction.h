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

// Input reduction: mask tokens of an input in ascending attribution order
// until the model's predicted label flips, then report the tokens that were
// still unmasked one step before the flip together with the original label.

#ifndef SHORTCUT_REDUCTION_H_
#define SHORTCUT_REDUCTION_H_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "shortcut/adapter.h"
#include "shortcut/corpus.h"

namespace shortcut {

struct ExtractionResult {
  std::string source_id;
  TokenSeq trigger;  // unmasked tokens of the last pre-flip state, in order
  LabelId label = 0;
  size_t steps = 0;  // masking steps performed
  // True iff masking every token never flipped the prediction; the trigger
  // is then the single highest-attribution (last masked) token.
  bool fallback = false;

  InferencePattern pattern() const { return {trigger, label}; }
  friend bool operator==(const ExtractionResult&,
                         const ExtractionResult&) = default;
};

struct ReductionStep {
  size_t step = 0;
  size_t masked_position = 0;
  TokenSeq remaining_tokens;
  LabelId prediction = 0;
};

using ReductionTrace = std::vector<ReductionStep>;

// Positions sorted by ascending score, ties by ascending position.
std::vector<size_t> MaskOrder(std::span<const double> attributions);

// Reduces one example. Attributions are computed once on the full input and
// fix the masking order for the whole reduction. Throws kContract for an
// empty example and propagates adapter errors.
ExtractionResult Reduce(const LabeledExample& example,
                        const ModelAdapter& adapter,
                        ReductionTrace* trace = nullptr);

// Reduces several examples in lockstep so that each masking step issues one
// batched predict call across all examples still in flight. Produces exactly
// what Reduce would for each example. `traces`, if given, is resized to match.
std::vector<ExtractionResult> ReduceBatch(
    std::span<const LabeledExample> examples, const ModelAdapter& adapter,
    std::vector<ReductionTrace>* traces = nullptr);

nlohmann::json TraceToJson(const ReductionTrace& trace);
nlohmann::json ExtractionToJson(const ExtractionResult& result);
ExtractionResult ExtractionFromJson(const nlohmann::json& j);

}  // namespace shortcut

#endif  // SHORTCUT_REDUCTION_H_
