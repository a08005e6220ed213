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

// Pattern quality measures, all in percentage points:
//
//   generality g   = 100 * |{x in E_OOD(w) : f(x) = l}| / |E_OOD(w)|
//   iid_acc        = 100 * |{x in E_IID(w) : f(x) = l and y = l}|
//                        / |{x in E_IID(w) : f(x) = l}|
//   delta          = F1(E_OOD(w)) - F1(whole OOD corpus)
//
// Predictions are always on full, unmasked inputs and come from a
// PredictionCache filled once per corpus.

#ifndef SHORTCUT_METRICS_H_
#define SHORTCUT_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shortcut/adapter.h"
#include "shortcut/corpus.h"
#include "shortcut/match_index.h"

namespace shortcut {

enum class F1Variant { kMacro, kMicro };

F1Variant ParseF1Variant(const std::string& name);
const char* F1VariantName(F1Variant variant);

// Predicted label of every example of one corpus, by corpus position.
class PredictionCache {
 public:
  PredictionCache() = default;
  explicit PredictionCache(std::vector<LabelId> labels)
      : labels_(std::move(labels)) {}

  // Batches of adapter.batch_size(), spread over `workers` threads.
  static PredictionCache Compute(const Corpus& corpus,
                                 const ModelAdapter& adapter,
                                 size_t workers = 1);

  LabelId label(size_t example) const { return labels_.at(example); }
  std::span<const LabelId> labels() const { return labels_; }
  size_t size() const { return labels_.size(); }

 private:
  std::vector<LabelId> labels_;
};

// Per-class F1 averaged over classes that occur in golds or predictions;
// classes absent from both are skipped. Result in [0, 100]. Throws
// kContract on empty or mismatched inputs.
double MacroF1(std::span<const LabelId> predictions,
               std::span<const LabelId> golds, int label_count);
// Micro-averaged F1, which for single-label data is accuracy * 100.
double MicroF1(std::span<const LabelId> predictions,
               std::span<const LabelId> golds, int label_count);
double F1Score(F1Variant variant, std::span<const LabelId> predictions,
               std::span<const LabelId> golds, int label_count);

// F1 over the whole corpus; the Delta baseline.
double CorpusF1(const Corpus& corpus, const PredictionCache& predictions,
                F1Variant variant = F1Variant::kMacro);

// Throws kUndefinedStat when the match set is empty.
double Generality(const InferencePattern& pattern, const MatchSet& ood_matches,
                  const PredictionCache& ood_predictions);

struct IidAccuracy {
  std::optional<double> value;  // nullopt when no match predicts the label
  size_t predicted_label = 0;   // denominator
  size_t correct = 0;           // numerator
};

// Throws kUndefinedStat when the match set is empty.
IidAccuracy ComputeIidAccuracy(const InferencePattern& pattern,
                               const MatchSet& iid_matches,
                               const Corpus& iid,
                               const PredictionCache& iid_predictions);

// Throws kUndefinedStat when the match set is empty.
double DeltaF1(const MatchSet& ood_matches, const Corpus& ood,
               const PredictionCache& ood_predictions, double baseline_f1,
               F1Variant variant = F1Variant::kMacro);

struct PatternStats {
  InferencePattern pattern;
  std::optional<double> g;
  std::optional<double> iid_acc;
  std::optional<double> delta;
  size_t support_iid = 0;
  size_t support_ood = 0;
  size_t n_pred_l_iid = 0;
  // Reason codes for every undefined statistic, e.g. "no OOD matches".
  std::vector<std::string> undefined;
};

struct ScoringContext {
  const Corpus& iid;
  const Corpus& ood;
  const TriggerIndex& iid_index;
  const TriggerIndex& ood_index;
  const PredictionCache& iid_predictions;
  const PredictionCache& ood_predictions;
  double baseline_f1_ood;
  F1Variant variant = F1Variant::kMacro;
  MatchMode mode = MatchMode::kSubsequence;
};

inline constexpr char kNoOodMatches[] = "no OOD matches";
inline constexpr char kNoIidMatches[] = "no IID matches";
inline constexpr char kDenominatorZero[] = "denominator zero";

PatternStats ComputeStats(const InferencePattern& pattern,
                          const ScoringContext& ctx);

// Stats for many patterns on `workers` threads; output order follows input.
std::vector<PatternStats> ComputeAllStats(
    std::span<const InferencePattern> patterns, const ScoringContext& ctx,
    size_t workers = 1);

}  // namespace shortcut

#endif  // SHORTCUT_METRICS_H_
