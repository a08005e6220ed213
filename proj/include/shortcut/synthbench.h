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

// Synthetic IID/OOD corpus pairs with planted shortcut triggers, a lexicon
// model constructed (not trained) to exploit them, and scoring of a shortcut
// report against the known ground truth.
//
// Generation, per example:
//   * With total probability sum(trigger_rate) the example carries exactly
//     one planted trigger, chosen in proportion to trigger_rate. Its gold
//     label is the planted label with probability iid_plant_rate (otherwise
//     uniform over the other labels) in the IID split, and follows
//     ood_label_dist in the OOD split. With probability cue_rate it also
//     carries a genuine cue token of its gold label.
//   * Otherwise the gold label is uniform and the example carries a genuine
//     cue of it with probability genuine_rate.
//   * Filler tokens w0..w{vocab_size-1} are label independent.
//
// Model: cue tokens weigh genuine_weight toward their label; a k-token
// trigger spreads its weight over k tokens so that the whole trigger beats
// the baseline bias but no proper subset does; the baseline label (lowest
// label without plants) gets bias baseline_bias. Cues outweigh triggers, so
// cue-bearing examples are classified correctly, while cue-less
// trigger-bearing ones follow the trigger.

#ifndef SHORTCUT_SYNTHBENCH_H_
#define SHORTCUT_SYNTHBENCH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shortcut/adapter.h"
#include "shortcut/corpus.h"
#include "shortcut/identify.h"

namespace shortcut {

struct PlantSpec {
  TokenSeq trigger;
  LabelId planted_label = 0;
  double iid_plant_rate = 0.95;       // in (0.5, 1]
  std::vector<double> ood_label_dist;  // empty means uniform
  double trigger_rate = 0.12;
  double cue_rate = 0.3;
};

struct BenchSpec {
  std::vector<std::string> label_names = {"negative", "neutral", "positive"};
  size_t n_iid = 2000;
  size_t n_ood = 2000;
  size_t vocab_size = 400;
  size_t cues_per_label = 2;
  size_t min_fillers = 6;
  size_t max_fillers = 14;
  double genuine_rate = 1.0;
  double genuine_weight = 3.0;
  double trigger_weight = 2.0;
  double baseline_bias = 1.0;
  uint64_t seed = 0;
  std::vector<PlantSpec> plants;

  int label_count() const { return static_cast<int>(label_names.size()); }
  // Throws kConfig on inconsistent settings.
  void Validate() const;
};

// Three plants: a single-token, a two-token and another single-token
// trigger on the labels that are not the baseline label.
BenchSpec DefaultBenchSpec(uint64_t seed = 0);

struct GroundTruth {
  std::vector<InferencePattern> planted;
  TokenSeq genuine_tokens;
};

struct Benchmark {
  Corpus iid;
  Corpus ood;
  ToyLexiconModel model;
  GroundTruth truth;
};

Benchmark Generate(const BenchSpec& spec);

// Weight vector given to each token of a k-token trigger.
double TriggerTokenWeight(const BenchSpec& spec, size_t trigger_length);
// Label that wins on an all-mask input.
LabelId BaselineLabel(const BenchSpec& spec);

struct PlantOutcome {
  InferencePattern plant;
  bool recalled = false;
  std::vector<InferencePattern> matched_by;
};

struct DetectionScore {
  double precision = 1.0;
  bool precision_defined = false;  // false when nothing was reported
  double recall = 0.0;
  bool recall_defined = false;     // false when nothing was planted
  size_t reported = 0;
  size_t reported_matched = 0;
  std::vector<PlantOutcome> per_plant;
  // Reported patterns whose trigger holds a genuine token.
  std::vector<InferencePattern> genuine_reported;
};

// A plant is recalled if some reported pattern has its label and contains
// all of its trigger tokens in order; a reported pattern counts toward
// precision if it recalls some plant.
DetectionScore EvaluateDetection(const ShortcutReport& report,
                                 const GroundTruth& truth);

nlohmann::json BenchSpecToJson(const BenchSpec& spec);
BenchSpec BenchSpecFromJson(const nlohmann::json& j);
nlohmann::json GroundTruthToJson(const GroundTruth& truth);
GroundTruth GroundTruthFromJson(const nlohmann::json& j);
nlohmann::json DetectionToJson(const DetectionScore& score);

}  // namespace shortcut

#endif  // SHORTCUT_SYNTHBENCH_H_
