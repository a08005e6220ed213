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

// The three audit stages (mine, score, identify) with file outputs, plus the
// synthetic benchmark driver. Every output is a deterministic function of
// its inputs and configuration: no timestamps, sorted collections.

#ifndef SHORTCUT_PIPELINE_H_
#define SHORTCUT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shortcut/adapter.h"
#include "shortcut/corpus.h"
#include "shortcut/identify.h"
#include "shortcut/match_index.h"
#include "shortcut/metrics.h"
#include "shortcut/miner.h"
#include "shortcut/synthbench.h"

namespace shortcut {

struct RunConfig {
  std::filesystem::path iid_path;
  std::filesystem::path ood_path;
  std::vector<std::string> label_names;
  // Exactly one of these is set.
  std::optional<std::filesystem::path> toy_weights;
  std::optional<std::string> remote_url;
  size_t remote_batch_size = 32;
  size_t n_samples = 1000;
  uint64_t seed = 0;
  size_t workers = 1;
  bool include_fallback = false;
  MatchMode match_mode = MatchMode::kSubsequence;
  F1Variant f1 = F1Variant::kMacro;
  Thresholds thresholds;
  std::filesystem::path output_dir = "audit_out";

  // Throws kConfig. Checks file existence only when check_paths is set.
  void Validate(bool check_paths = true) const;
};

// Relative paths in the file are resolved against `base_dir`.
RunConfig RunConfigFromJson(const nlohmann::json& j,
                            const std::filesystem::path& base_dir = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);
nlohmann::json RunConfigToJson(const RunConfig& config);

std::unique_ptr<ModelAdapter> MakeAdapter(const RunConfig& config);

// Output file names inside RunConfig::output_dir.
inline constexpr char kCandidatesFile[] = "candidates.json";
inline constexpr char kExtractionsFile[] = "extractions.jsonl";
inline constexpr char kMineErrorsFile[] = "mine_errors.json";
inline constexpr char kStatsFile[] = "stats.json";
inline constexpr char kReportJsonFile[] = "report.json";
inline constexpr char kReportMarkdownFile[] = "report.md";

// Loads and tokenizes one corpus of the run.
Corpus PrepareCorpus(const std::filesystem::path& path,
                     const std::vector<std::string>& label_names, Split split,
                     const ModelAdapter& adapter);

struct ScoredCandidates {
  std::vector<StatsRow> rows;  // in candidate order
  double baseline_f1_ood = 0.0;
  nlohmann::json metadata = nlohmann::json::object();
};

// Builds both indexes and prediction caches and scores every candidate.
ScoredCandidates ScoreCandidates(const CandidateSet& candidates,
                                 const Corpus& iid, const Corpus& ood,
                                 const ModelAdapter& adapter,
                                 MatchMode mode, F1Variant variant,
                                 size_t workers);

nlohmann::json StatsToJson(const ScoredCandidates& scored,
                           const std::vector<std::string>& label_names);
ScoredCandidates StatsFromJson(const nlohmann::json& j,
                               std::vector<std::string>* label_names);

struct MineStageResult {
  CandidateSet candidates;
  size_t resumed = 0;  // extractions reused from a previous run
};

// mine: sample + reduce + merge. Writes candidates.json and
// extractions.jsonl; if some reductions failed, also mine_errors.json. With
// `resume`, extractions already present in extractions.jsonl are reused and
// only the missing sampled examples are reduced. `trace_path`, if set,
// receives one JSON line per reduced example with its masking trace.
MineStageResult RunMineStage(const RunConfig& config,
                             const ModelAdapter& adapter, bool resume,
                             const std::optional<std::filesystem::path>&
                                 trace_path = std::nullopt);

// score: writes stats.json for the given candidates file.
ScoredCandidates RunScoreStage(const RunConfig& config,
                               const ModelAdapter& adapter,
                               const std::filesystem::path& candidates_path);

// identify: writes report.json and report.md for the given stats file.
ShortcutReport RunIdentifyStage(const RunConfig& config,
                                const std::filesystem::path& stats_path);

// mine, score and identify in one process without intermediate files.
ShortcutReport RunEndToEnd(const RunConfig& config,
                           const ModelAdapter& adapter);

struct BenchOptions {
  size_t n_samples = 1000;
  size_t workers = 1;
  Thresholds thresholds;
  MatchMode match_mode = MatchMode::kSubsequence;
  F1Variant f1 = F1Variant::kMacro;
  bool include_fallback = false;
  // When set, corpora, model, ground truth and report are written here.
  std::optional<std::filesystem::path> output_dir;
};

struct BenchOutcome {
  uint64_t seed = 0;
  size_t candidates = 0;
  ShortcutReport report;
  DetectionScore detection;
  GroundTruth truth;
};

// generate -> mine -> score -> identify -> evaluate, for one seed.
BenchOutcome RunBench(const BenchSpec& spec, const BenchOptions& options);

nlohmann::json BenchSummaryJson(const std::vector<BenchOutcome>& outcomes);
std::string BenchSummaryText(const std::vector<BenchOutcome>& outcomes);

// Writes `text` to `path` atomically enough for our purposes: a temp file
// in the same directory renamed over the target.
void WriteFile(const std::filesystem::path& path, const std::string& text);
nlohmann::json ReadJsonFile(const std::filesystem::path& path);

}  // namespace shortcut

#endif  // SHORTCUT_PIPELINE_H_
