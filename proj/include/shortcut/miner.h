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

#ifndef SHORTCUT_MINER_H_
#define SHORTCUT_MINER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "shortcut/adapter.h"
#include "shortcut/corpus.h"
#include "shortcut/reduction.h"

namespace shortcut {

struct Provenance {
  size_t extraction_count = 0;
  size_t fallback_count = 0;
  std::vector<std::string> source_ids;  // in extraction order
};

// Deduplicated inference patterns with per-pattern provenance. Iteration is
// ordered by (trigger, label).
struct CandidateSet {
  std::map<InferencePattern, Provenance> patterns;
  size_t reductions = 0;         // successful reductions seen
  size_t fallback_excluded = 0;  // fallback results dropped by the filter
  std::vector<std::string> failed_ids;
  std::string error_summary;  // empty when every reduction succeeded

  bool complete() const { return failed_ids.empty(); }
};

struct MineOptions {
  size_t n_samples = 1000;
  uint64_t seed = 0;
  bool include_fallback = false;
  size_t workers = 1;
  // Ids to skip because their results are already known (resume).
  std::vector<std::string> skip_ids;
  bool collect_traces = false;
};

struct MineOutput {
  CandidateSet candidates;
  // Every successful reduction of this run, in sample order, fallback ones
  // included; the candidate set is a pure function of this list.
  std::vector<ExtractionResult> extractions;
  // Parallel to `extractions` when MineOptions::collect_traces is set.
  std::vector<ReductionTrace> traces;
};

// Merges extraction results into a candidate set. Fallback results are
// counted in fallback_excluded unless include_fallback is set.
CandidateSet MergeExtractions(const std::vector<ExtractionResult>& results,
                              bool include_fallback);

// Samples the IID corpus, reduces every sampled example and merges the
// results. Reductions run on `workers` threads in chunks of the adapter's
// batch size; if a chunk fails its example ids are reported in failed_ids
// and the remaining chunks still run.
MineOutput Mine(const Corpus& iid, const ModelAdapter& adapter,
                const MineOptions& options);

// [{"trigger":[...],"label":int,"extraction_count":int,"fallback_count":int,
//   "source_ids":[...]}], ordered by (trigger, label).
nlohmann::json CandidatesToJson(const CandidateSet& candidates);
CandidateSet CandidatesFromJson(const nlohmann::json& j);

}  // namespace shortcut

#endif  // SHORTCUT_MINER_H_
