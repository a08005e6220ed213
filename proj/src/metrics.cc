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

#include "shortcut/metrics.h"

#include <algorithm>
#include <atomic>
#include <thread>

#include "shortcut/errors.h"

namespace shortcut {
namespace {

void CheckLengths(std::span<const LabelId> predictions,
                  std::span<const LabelId> golds, int label_count) {
  if (predictions.size() != golds.size()) {
    throw AuditError(ErrorKind::kContract,
                     "predictions and golds differ in length");
  }
  if (predictions.empty()) {
    throw AuditError(ErrorKind::kContract, "F1 over zero examples");
  }
  auto in_range = [&](LabelId l) { return l >= 0 && l < label_count; };
  if (!std::all_of(predictions.begin(), predictions.end(), in_range) ||
      !std::all_of(golds.begin(), golds.end(), in_range)) {
    throw AuditError(ErrorKind::kContract, "label id out of range");
  }
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void ParallelFor(size_t n, size_t workers, Fn fn) {
  workers = std::clamp<size_t>(workers, 1, std::max<size_t>(n, 1));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (size_t i = next++; i < n; i = next++) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

F1Variant ParseF1Variant(const std::string& name) {
  if (name == "macro") return F1Variant::kMacro;
  if (name == "micro") return F1Variant::kMicro;
  throw AuditError(ErrorKind::kConfig, "unknown F1 variant '" + name + "'");
}

const char* F1VariantName(F1Variant variant) {
  return variant == F1Variant::kMacro ? "macro" : "micro";
}

PredictionCache PredictionCache::Compute(const Corpus& corpus,
                                         const ModelAdapter& adapter,
                                         size_t workers) {
  if (!corpus.empty() && !corpus.tokenized()) {
    throw AuditError(ErrorKind::kContract, "corpus is not tokenized");
  }
  const size_t batch = std::max<size_t>(adapter.batch_size(), 1);
  const size_t n_batches = (corpus.size() + batch - 1) / batch;
  std::vector<LabelId> labels(corpus.size());
  ParallelFor(n_batches, workers, [&](size_t b) {
    const size_t begin = b * batch;
    const size_t end = std::min(begin + batch, corpus.size());
    std::vector<TokenSeq> inputs;
    inputs.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) {
      inputs.push_back(corpus.examples[i].tokens);
    }
    const auto preds = adapter.PredictBatch(inputs);
    if (preds.size() != inputs.size()) {
      throw AuditError(ErrorKind::kProtocol,
                       "adapter returned a wrong number of predictions");
    }
    for (size_t i = begin; i < end; ++i) labels[i] = preds[i - begin].label;
  });
  return PredictionCache(std::move(labels));
}

double MacroF1(std::span<const LabelId> predictions,
               std::span<const LabelId> golds, int label_count) {
  CheckLengths(predictions, golds, label_count);
  std::vector<size_t> tp(label_count), pred_count(label_count),
      gold_count(label_count);
  for (size_t i = 0; i < predictions.size(); ++i) {
    ++pred_count[predictions[i]];
    ++gold_count[golds[i]];
    if (predictions[i] == golds[i]) ++tp[golds[i]];
  }
  double total = 0.0;
  int included = 0;
  for (int c = 0; c < label_count; ++c) {
    if (pred_count[c] == 0 && gold_count[c] == 0) continue;
    ++included;
    if (tp[c] == 0) continue;
    // F1 = 2TP / (2TP + FP + FN) = 2TP / (|pred| + |gold|)
    total += 2.0 * static_cast<double>(tp[c]) /
             static_cast<double>(pred_count[c] + gold_count[c]);
  }
  return 100.0 * total / included;
}

double MicroF1(std::span<const LabelId> predictions,
               std::span<const LabelId> golds, int label_count) {
  CheckLengths(predictions, golds, label_count);
  size_t correct = 0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == golds[i]) ++correct;
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(predictions.size());
}

double F1Score(F1Variant variant, std::span<const LabelId> predictions,
               std::span<const LabelId> golds, int label_count) {
  return variant == F1Variant::kMacro
             ? MacroF1(predictions, golds, label_count)
             : MicroF1(predictions, golds, label_count);
}

double CorpusF1(const Corpus& corpus, const PredictionCache& predictions,
                F1Variant variant) {
  if (predictions.size() != corpus.size()) {
    throw AuditError(ErrorKind::kContract,
                     "prediction cache does not cover the corpus");
  }
  std::vector<LabelId> golds;
  golds.reserve(corpus.size());
  for (const auto& ex : corpus.examples) golds.push_back(ex.gold_label);
  return F1Score(variant, predictions.labels(), golds, corpus.label_count());
}

double Generality(const InferencePattern& pattern, const MatchSet& ood_matches,
                  const PredictionCache& ood_predictions) {
  if (ood_matches.empty()) {
    throw AuditError(ErrorKind::kUndefinedStat,
                     "generality of " + FormatTrigger(pattern.trigger) +
                         " is undefined: " + kNoOodMatches);
  }
  size_t hits = 0;
  for (uint32_t i : ood_matches.examples) {
    if (ood_predictions.label(i) == pattern.label) ++hits;
  }
  return 100.0 * static_cast<double>(hits) /
         static_cast<double>(ood_matches.size());
}

IidAccuracy ComputeIidAccuracy(const InferencePattern& pattern,
                               const MatchSet& iid_matches, const Corpus& iid,
                               const PredictionCache& iid_predictions) {
  if (iid_matches.empty()) {
    throw AuditError(ErrorKind::kUndefinedStat,
                     "iid_acc of " + FormatTrigger(pattern.trigger) +
                         " is undefined: " + kNoIidMatches);
  }
  IidAccuracy acc;
  for (uint32_t i : iid_matches.examples) {
    if (iid_predictions.label(i) != pattern.label) continue;
    ++acc.predicted_label;
    if (iid.examples.at(i).gold_label == pattern.label) ++acc.correct;
  }
  if (acc.predicted_label > 0) {
    acc.value = 100.0 * static_cast<double>(acc.correct) /
                static_cast<double>(acc.predicted_label);
  }
  return acc;
}

double DeltaF1(const MatchSet& ood_matches, const Corpus& ood,
               const PredictionCache& ood_predictions, double baseline_f1,
               F1Variant variant) {
  if (ood_matches.empty()) {
    throw AuditError(ErrorKind::kUndefinedStat,
                     std::string("delta is undefined: ") + kNoOodMatches);
  }
  std::vector<LabelId> preds, golds;
  preds.reserve(ood_matches.size());
  golds.reserve(ood_matches.size());
  for (uint32_t i : ood_matches.examples) {
    preds.push_back(ood_predictions.label(i));
    golds.push_back(ood.examples.at(i).gold_label);
  }
  return F1Score(variant, preds, golds, ood.label_count()) - baseline_f1;
}

PatternStats ComputeStats(const InferencePattern& pattern,
                          const ScoringContext& ctx) {
  PatternStats stats;
  stats.pattern = pattern;
  const MatchSet iid = ctx.iid_index.FindMatches(pattern.trigger, ctx.mode);
  const MatchSet ood = ctx.ood_index.FindMatches(pattern.trigger, ctx.mode);
  stats.support_iid = iid.size();
  stats.support_ood = ood.size();

  if (ood.empty()) {
    stats.undefined.push_back(kNoOodMatches);
  } else {
    stats.g = Generality(pattern, ood, ctx.ood_predictions);
    stats.delta = DeltaF1(ood, ctx.ood, ctx.ood_predictions,
                          ctx.baseline_f1_ood, ctx.variant);
  }
  if (iid.empty()) {
    stats.undefined.push_back(kNoIidMatches);
  } else {
    const IidAccuracy acc =
        ComputeIidAccuracy(pattern, iid, ctx.iid, ctx.iid_predictions);
    stats.n_pred_l_iid = acc.predicted_label;
    stats.iid_acc = acc.value;
    if (!acc.value) stats.undefined.push_back(kDenominatorZero);
  }
  return stats;
}

std::vector<PatternStats> ComputeAllStats(
    std::span<const InferencePattern> patterns, const ScoringContext& ctx,
    size_t workers) {
  std::vector<PatternStats> out(patterns.size());
  ParallelFor(patterns.size(), workers,
              [&](size_t i) { out[i] = ComputeStats(patterns[i], ctx); });
  return out;
}

}  // namespace shortcut
