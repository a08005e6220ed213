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

#include "shortcut/reduction.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shortcut/errors.h"

namespace shortcut {

std::vector<size_t> MaskOrder(std::span<const double> attributions) {
  std::vector<size_t> order(attributions.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return attributions[a] < attributions[b];
  });
  return order;
}

namespace {

struct InFlight {
  const LabeledExample* example = nullptr;
  LabelId original = 0;
  std::vector<size_t> order;
  TokenSeq state;
  size_t steps = 0;
};

// Trigger for a flip observed after `steps` masks: everything the previous
// state left unmasked, i.e. positions order[steps-1 ..], in original order.
TokenSeq PreFlipTokens(const InFlight& r) {
  std::vector<size_t> kept(r.order.begin() + (r.steps - 1), r.order.end());
  std::sort(kept.begin(), kept.end());
  TokenSeq trigger;
  trigger.reserve(kept.size());
  for (size_t pos : kept) trigger.push_back(r.example->tokens[pos]);
  return trigger;
}

}  // namespace

std::vector<ExtractionResult> ReduceBatch(
    std::span<const LabeledExample> examples, const ModelAdapter& adapter,
    std::vector<ReductionTrace>* traces) {
  std::vector<ExtractionResult> results(examples.size());
  if (traces) traces->assign(examples.size(), {});
  if (examples.empty()) return results;

  std::vector<TokenSeq> inputs;
  inputs.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.tokens.empty()) {
      throw AuditError(ErrorKind::kContract,
                       "cannot reduce example '" + ex.id + "' with no tokens");
    }
    inputs.push_back(ex.tokens);
  }

  const auto predictions = adapter.PredictBatch(inputs);
  const auto attributions = adapter.AttributeBatch(inputs);
  if (predictions.size() != inputs.size() ||
      attributions.size() != inputs.size()) {
    throw AuditError(ErrorKind::kProtocol,
                     "adapter returned a wrong number of results");
  }

  std::vector<InFlight> flights(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    const auto& scores = attributions[i];
    if (scores.size() != examples[i].tokens.size()) {
      throw AuditError(ErrorKind::kProtocol,
                       "attribution length differs from token count");
    }
    for (double s : scores) {
      if (!std::isfinite(s)) {
        throw AuditError(ErrorKind::kProtocol, "non-finite attribution");
      }
    }
    flights[i].example = &examples[i];
    flights[i].original = predictions[i].label;
    flights[i].order = MaskOrder(scores);
    flights[i].state = examples[i].tokens;
    results[i].source_id = examples[i].id;
    results[i].label = predictions[i].label;
  }

  std::vector<size_t> active(examples.size());
  std::iota(active.begin(), active.end(), size_t{0});
  std::vector<TokenSeq> batch;
  while (!active.empty()) {
    batch.clear();
    for (size_t idx : active) {
      InFlight& r = flights[idx];
      r.state[r.order[r.steps]] = adapter.mask_token();
      ++r.steps;
      batch.push_back(r.state);
    }
    const auto step_preds = adapter.PredictBatch(batch);
    if (step_preds.size() != batch.size()) {
      throw AuditError(ErrorKind::kProtocol,
                       "adapter returned a wrong number of predictions");
    }

    std::vector<size_t> still_active;
    for (size_t k = 0; k < active.size(); ++k) {
      const size_t idx = active[k];
      InFlight& r = flights[idx];
      ExtractionResult& out = results[idx];
      const LabelId now = step_preds[k].label;
      if (traces) {
        TokenSeq remaining;
        for (size_t p = 0; p < r.state.size(); ++p) {
          if (std::find(r.order.begin(), r.order.begin() + r.steps, p) ==
              r.order.begin() + r.steps) {
            remaining.push_back(r.example->tokens[p]);
          }
        }
        (*traces)[idx].push_back(
            {r.steps, r.order[r.steps - 1], std::move(remaining), now});
      }
      out.steps = r.steps;
      if (now != r.original) {
        out.trigger = PreFlipTokens(r);
      } else if (r.steps == r.order.size()) {
        out.trigger = {r.example->tokens[r.order.back()]};
        out.fallback = true;
      } else {
        still_active.push_back(idx);
      }
    }
    active.swap(still_active);
  }
  return results;
}

ExtractionResult Reduce(const LabeledExample& example,
                        const ModelAdapter& adapter, ReductionTrace* trace) {
  std::vector<ReductionTrace> traces;
  auto results = ReduceBatch(std::span<const LabeledExample>(&example, 1),
                             adapter, trace ? &traces : nullptr);
  if (trace) *trace = std::move(traces.front());
  return std::move(results.front());
}

nlohmann::json TraceToJson(const ReductionTrace& trace) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : trace) {
    arr.push_back({{"step", s.step},
                   {"masked_position", s.masked_position},
                   {"remaining_tokens", s.remaining_tokens},
                   {"prediction", s.prediction}});
  }
  return arr;
}

nlohmann::json ExtractionToJson(const ExtractionResult& r) {
  return {{"source_id", r.source_id}, {"trigger", r.trigger},
          {"label", r.label},         {"steps", r.steps},
          {"fallback", r.fallback}};
}

ExtractionResult ExtractionFromJson(const nlohmann::json& j) {
  try {
    ExtractionResult r;
    r.source_id = j.at("source_id").get<std::string>();
    r.trigger = j.at("trigger").get<TokenSeq>();
    r.label = j.at("label").get<LabelId>();
    r.steps = j.at("steps").get<size_t>();
    r.fallback = j.at("fallback").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorKind::kLoad,
                     std::string("malformed extraction record: ") + e.what());
  }
}

}  // namespace shortcut
