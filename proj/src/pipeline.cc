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

#include "shortcut/pipeline.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "shortcut/errors.h"
#include "shortcut/remote_adapter.h"
#include "spdlog/spdlog.h"

namespace shortcut {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void ConfigFail(const std::string& message) {
  throw AuditError(ErrorKind::kConfig, message);
}

const char* MatchModeName(MatchMode mode) {
  return mode == MatchMode::kSubsequence ? "subsequence" : "contiguous";
}

MatchMode ParseMatchMode(const std::string& name) {
  if (name == "subsequence") return MatchMode::kSubsequence;
  if (name == "contiguous") return MatchMode::kContiguous;
  ConfigFail("unknown match_mode '" + name + "'");
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string Dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json RunMetadata(const RunConfig& config) {
  return {{"seed", config.seed},
          {"n_samples", config.n_samples},
          {"include_fallback", config.include_fallback}};
}

}  // namespace

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) ConfigFail("cannot write " + tmp.string());
    out << text;
    if (!out) ConfigFail("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

nlohmann::json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) ConfigFail("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw AuditError(ErrorKind::kLoad,
                     "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void RunConfig::Validate(bool check_paths) const {
  if (toy_weights.has_value() == remote_url.has_value()) {
    ConfigFail("exactly one adapter (toy or remote) must be configured");
  }
  if (label_names.empty()) ConfigFail("label_names must be non-empty");
  if (n_samples == 0) ConfigFail("n_samples must be positive");
  if (workers == 0) ConfigFail("workers must be positive");
  if (remote_batch_size == 0) ConfigFail("adapter batch_size must be positive");
  thresholds.Validate(static_cast<int>(label_names.size()));
  if (check_paths) {
    for (const fs::path& p : {iid_path, ood_path}) {
      if (!fs::exists(p)) ConfigFail("missing corpus file " + p.string());
    }
    if (toy_weights && !fs::exists(*toy_weights)) {
      ConfigFail("missing toy model file " + toy_weights->string());
    }
  }
}

RunConfig RunConfigFromJson(const nlohmann::json& j, const fs::path& base) {
  RunConfig c;
  try {
    if (!j.is_object()) ConfigFail("config must be a JSON object");
    c.iid_path = Resolve(base, j.at("iid_path").get<std::string>());
    c.ood_path = Resolve(base, j.at("ood_path").get<std::string>());
    c.label_names = j.at("label_names").get<std::vector<std::string>>();
    const auto& adapter = j.at("adapter");
    if (adapter.contains("toy")) {
      c.toy_weights = Resolve(base, adapter["toy"].get<std::string>());
    }
    if (adapter.contains("remote")) {
      c.remote_url = adapter["remote"].get<std::string>();
    }
    c.remote_batch_size = adapter.value("batch_size", c.remote_batch_size);
    c.n_samples = j.value("n_samples", c.n_samples);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.include_fallback = j.value("include_fallback", c.include_fallback);
    c.match_mode = ParseMatchMode(j.value("match_mode", "subsequence"));
    c.f1 = ParseF1Variant(j.value("f1", "macro"));
    if (j.contains("thresholds")) {
      c.thresholds = ThresholdsFromJson(j["thresholds"]);
    }
    c.output_dir = Resolve(base, j.value("output_dir", "audit_out"));
  } catch (const nlohmann::json::exception& e) {
    ConfigFail(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig LoadRunConfig(const fs::path& path) {
  return RunConfigFromJson(ReadJsonFile(path), path.parent_path());
}

nlohmann::json RunConfigToJson(const RunConfig& c) {
  nlohmann::json adapter = nlohmann::json::object();
  if (c.toy_weights) adapter["toy"] = c.toy_weights->string();
  if (c.remote_url) {
    adapter["remote"] = *c.remote_url;
    adapter["batch_size"] = c.remote_batch_size;
  }
  return {{"iid_path", c.iid_path.string()},
          {"ood_path", c.ood_path.string()},
          {"label_names", c.label_names},
          {"adapter", adapter},
          {"n_samples", c.n_samples},
          {"seed", c.seed},
          {"workers", c.workers},
          {"include_fallback", c.include_fallback},
          {"match_mode", MatchModeName(c.match_mode)},
          {"f1", F1VariantName(c.f1)},
          {"thresholds", ThresholdsToJson(c.thresholds)},
          {"output_dir", c.output_dir.string()}};
}

std::unique_ptr<ModelAdapter> MakeAdapter(const RunConfig& config) {
  if (config.toy_weights) {
    return std::make_unique<ToyLexiconModel>(
        ToyLexiconModel::Load(*config.toy_weights));
  }
  if (config.remote_url) {
    RemoteAdapterOptions options;
    options.batch_size = config.remote_batch_size;
    options.pool_size = std::max<size_t>(config.workers, 1);
    return std::make_unique<RemoteAdapter>(*config.remote_url, options);
  }
  ConfigFail("no adapter configured");
}

Corpus PrepareCorpus(const fs::path& path,
                     const std::vector<std::string>& label_names, Split split,
                     const ModelAdapter& adapter) {
  if (static_cast<int>(label_names.size()) != adapter.label_count()) {
    ConfigFail("config lists " + std::to_string(label_names.size()) +
               " labels but the model has " +
               std::to_string(adapter.label_count()));
  }
  return TokenizeCorpus(LoadCorpus(path, label_names, split), adapter).corpus;
}

ScoredCandidates ScoreCandidates(const CandidateSet& candidates,
                                 const Corpus& iid, const Corpus& ood,
                                 const ModelAdapter& adapter, MatchMode mode,
                                 F1Variant variant, size_t workers) {
  const TriggerIndex iid_index = TriggerIndex::Build(iid);
  const TriggerIndex ood_index = TriggerIndex::Build(ood);
  const PredictionCache iid_preds =
      PredictionCache::Compute(iid, adapter, workers);
  const PredictionCache ood_preds =
      PredictionCache::Compute(ood, adapter, workers);

  ScoredCandidates scored;
  scored.baseline_f1_ood = CorpusF1(ood, ood_preds, variant);
  const ScoringContext ctx{iid,       ood,       iid_index,
                           ood_index, iid_preds, ood_preds,
                           scored.baseline_f1_ood, variant, mode};

  std::vector<InferencePattern> patterns;
  std::vector<const Provenance*> provenance;
  for (const auto& [pattern, prov] : candidates.patterns) {
    patterns.push_back(pattern);
    provenance.push_back(&prov);
  }
  auto stats = ComputeAllStats(patterns, ctx, workers);
  for (size_t i = 0; i < stats.size(); ++i) {
    scored.rows.push_back({std::move(stats[i]), *provenance[i]});
  }
  scored.metadata = {{"iid_corpus_hash", CorpusHash(iid)},
                     {"ood_corpus_hash", CorpusHash(ood)},
                     {"iid_size", iid.size()},
                     {"ood_size", ood.size()},
                     {"adapter", adapter.identity()},
                     {"match_mode", MatchModeName(mode)},
                     {"f1", F1VariantName(variant)}};
  return scored;
}

nlohmann::json StatsToJson(const ScoredCandidates& scored,
                           const std::vector<std::string>& label_names) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : scored.rows) rows.push_back(StatsRowToJson(row));
  return {{"label_names", label_names},
          {"baseline_f1_ood", scored.baseline_f1_ood},
          {"metadata", scored.metadata},
          {"rows", rows}};
}

ScoredCandidates StatsFromJson(const nlohmann::json& j,
                               std::vector<std::string>* label_names) {
  ScoredCandidates scored;
  try {
    scored.baseline_f1_ood = j.at("baseline_f1_ood").get<double>();
    scored.metadata = j.value("metadata", nlohmann::json::object());
    if (label_names) {
      *label_names = j.at("label_names").get<std::vector<std::string>>();
    }
    for (const auto& row : j.at("rows")) {
      scored.rows.push_back(StatsRowFromJson(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorKind::kLoad,
                     std::string("malformed stats file: ") + e.what());
  }
  return scored;
}

MineStageResult RunMineStage(const RunConfig& config,
                             const ModelAdapter& adapter, bool resume,
                             const std::optional<fs::path>& trace_path) {
  config.Validate();
  const Corpus iid =
      PrepareCorpus(config.iid_path, config.label_names, Split::kIid, adapter);
  if (iid.empty()) ConfigFail("IID corpus has no usable examples");

  const fs::path extractions_path = config.output_dir / kExtractionsFile;
  const std::vector<LabeledExample> sample =
      SampleExamples(iid, config.n_samples, config.seed);
  std::unordered_map<std::string, size_t> sample_rank;
  for (size_t i = 0; i < sample.size(); ++i) sample_rank[sample[i].id] = i;

  std::vector<ExtractionResult> all;
  if (resume && fs::exists(extractions_path)) {
    std::ifstream in(extractions_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ExtractionResult r;
      try {
        r = ExtractionFromJson(nlohmann::json::parse(line));
      } catch (const nlohmann::json::parse_error&) {
        spdlog::warn("ignoring unreadable line in {}", extractions_path.string());
        continue;
      }
      if (sample_rank.contains(r.source_id)) all.push_back(std::move(r));
    }
  }
  MineStageResult result;
  result.resumed = all.size();

  MineOptions options;
  options.n_samples = config.n_samples;
  options.seed = config.seed;
  options.include_fallback = config.include_fallback;
  options.workers = config.workers;
  options.collect_traces = trace_path.has_value();
  for (const auto& r : all) options.skip_ids.push_back(r.source_id);
  MineOutput mined = Mine(iid, adapter, options);

  if (trace_path) {
    std::string lines;
    for (size_t i = 0; i < mined.extractions.size(); ++i) {
      nlohmann::json j = {{"source_id", mined.extractions[i].source_id},
                          {"trace", TraceToJson(mined.traces[i])}};
      lines += j.dump() + "\n";
    }
    WriteFile(*trace_path, lines);
  }

  for (auto& r : mined.extractions) all.push_back(std::move(r));
  std::sort(all.begin(), all.end(),
            [&](const ExtractionResult& a, const ExtractionResult& b) {
              return sample_rank.at(a.source_id) < sample_rank.at(b.source_id);
            });
  result.candidates = MergeExtractions(all, config.include_fallback);
  result.candidates.failed_ids = mined.candidates.failed_ids;
  result.candidates.error_summary = mined.candidates.error_summary;

  std::string lines;
  for (const auto& r : all) lines += ExtractionToJson(r).dump() + "\n";
  WriteFile(extractions_path, lines);
  WriteFile(config.output_dir / kCandidatesFile,
            Dump(CandidatesToJson(result.candidates)));
  WriteFile(config.output_dir / "mine_config.json",
            Dump(RunConfigToJson(config)));
  const fs::path errors_path = config.output_dir / kMineErrorsFile;
  if (result.candidates.complete()) {
    fs::remove(errors_path);
  } else {
    WriteFile(errors_path,
              Dump({{"failed_ids", result.candidates.failed_ids},
                    {"error", result.candidates.error_summary}}));
  }
  return result;
}

ScoredCandidates RunScoreStage(const RunConfig& config,
                               const ModelAdapter& adapter,
                               const fs::path& candidates_path) {
  config.Validate();
  if (!fs::exists(candidates_path)) {
    ConfigFail("missing candidates file " + candidates_path.string());
  }
  const CandidateSet candidates =
      CandidatesFromJson(ReadJsonFile(candidates_path));
  const Corpus iid =
      PrepareCorpus(config.iid_path, config.label_names, Split::kIid, adapter);
  const Corpus ood =
      PrepareCorpus(config.ood_path, config.label_names, Split::kOod, adapter);
  if (ood.empty()) ConfigFail("OOD corpus has no usable examples");
  ScoredCandidates scored =
      ScoreCandidates(candidates, iid, ood, adapter, config.match_mode,
                      config.f1, config.workers);
  WriteFile(config.output_dir / kStatsFile,
            Dump(StatsToJson(scored, config.label_names)));
  WriteFile(config.output_dir / "score_config.json",
            Dump(RunConfigToJson(config)));
  return scored;
}

namespace {

ShortcutReport BuildReport(const RunConfig& config,
                           const ScoredCandidates& scored) {
  ShortcutReport report = Identify(scored.rows, config.thresholds,
                                   config.label_names, scored.baseline_f1_ood);
  report.metadata = scored.metadata;
  report.metadata.update(RunMetadata(config));
  return report;
}

}  // namespace

ShortcutReport RunIdentifyStage(const RunConfig& config,
                                const fs::path& stats_path) {
  config.thresholds.Validate(static_cast<int>(config.label_names.size()));
  if (!fs::exists(stats_path)) {
    ConfigFail("missing stats file " + stats_path.string());
  }
  std::vector<std::string> label_names;
  const ScoredCandidates scored =
      StatsFromJson(ReadJsonFile(stats_path), &label_names);
  if (label_names != config.label_names) {
    ConfigFail("stats file label set differs from the config");
  }
  ShortcutReport report = BuildReport(config, scored);
  WriteFile(config.output_dir / kReportJsonFile, Dump(ReportToJson(report)));
  WriteFile(config.output_dir / kReportMarkdownFile, ReportToMarkdown(report));
  WriteFile(config.output_dir / "identify_config.json",
            Dump(RunConfigToJson(config)));
  return report;
}

ShortcutReport RunEndToEnd(const RunConfig& config,
                           const ModelAdapter& adapter) {
  config.Validate();
  const Corpus iid =
      PrepareCorpus(config.iid_path, config.label_names, Split::kIid, adapter);
  const Corpus ood =
      PrepareCorpus(config.ood_path, config.label_names, Split::kOod, adapter);
  MineOptions options;
  options.n_samples = config.n_samples;
  options.seed = config.seed;
  options.include_fallback = config.include_fallback;
  options.workers = config.workers;
  const MineOutput mined = Mine(iid, adapter, options);
  if (!mined.candidates.complete()) {
    throw AuditError(ErrorKind::kTransport, mined.candidates.error_summary);
  }
  const ScoredCandidates scored =
      ScoreCandidates(mined.candidates, iid, ood, adapter, config.match_mode,
                      config.f1, config.workers);
  return BuildReport(config, scored);
}

BenchOutcome RunBench(const BenchSpec& spec, const BenchOptions& options) {
  Benchmark bench = Generate(spec);
  const ToyLexiconModel& model = bench.model;
  const Corpus iid = TokenizeCorpus(bench.iid, model).corpus;
  const Corpus ood = TokenizeCorpus(bench.ood, model).corpus;

  MineOptions mine_options;
  mine_options.n_samples = options.n_samples;
  mine_options.seed = spec.seed;
  mine_options.include_fallback = options.include_fallback;
  mine_options.workers = options.workers;
  const MineOutput mined = Mine(iid, model, mine_options);
  const ScoredCandidates scored =
      ScoreCandidates(mined.candidates, iid, ood, model, options.match_mode,
                      options.f1, options.workers);

  BenchOutcome outcome;
  outcome.seed = spec.seed;
  outcome.candidates = mined.candidates.patterns.size();
  outcome.report = Identify(scored.rows, options.thresholds, spec.label_names,
                            scored.baseline_f1_ood);
  outcome.report.metadata = scored.metadata;
  outcome.report.metadata["seed"] = spec.seed;
  outcome.report.metadata["n_samples"] = options.n_samples;
  outcome.detection = EvaluateDetection(outcome.report, bench.truth);
  outcome.truth = bench.truth;

  if (options.output_dir) {
    const fs::path dir = *options.output_dir;
    fs::create_directories(dir);
    SaveCorpus(bench.iid, dir / "iid.jsonl");
    SaveCorpus(bench.ood, dir / "ood.jsonl");
    model.Save(dir / "model.json");
    WriteFile(dir / "spec.json", Dump(BenchSpecToJson(spec)));
    WriteFile(dir / "truth.json", Dump(GroundTruthToJson(bench.truth)));
    WriteFile(dir / kCandidatesFile, Dump(CandidatesToJson(mined.candidates)));
    WriteFile(dir / kStatsFile, Dump(StatsToJson(scored, spec.label_names)));
    WriteFile(dir / kReportJsonFile, Dump(ReportToJson(outcome.report)));
    WriteFile(dir / kReportMarkdownFile, ReportToMarkdown(outcome.report));
    WriteFile(dir / "detection.json",
              Dump(DetectionToJson(outcome.detection)));
  }
  return outcome;
}

nlohmann::json BenchSummaryJson(const std::vector<BenchOutcome>& outcomes) {
  nlohmann::json runs = nlohmann::json::array();
  double min_precision = 1.0, min_recall = 1.0;
  bool any_recall = false;
  size_t genuine = 0;
  for (const auto& o : outcomes) {
    runs.push_back({{"seed", o.seed},
                    {"candidates", o.candidates},
                    {"detection", DetectionToJson(o.detection)}});
    min_precision = std::min(min_precision, o.detection.precision);
    if (o.detection.recall_defined) {
      any_recall = true;
      min_recall = std::min(min_recall, o.detection.recall);
    }
    genuine += o.detection.genuine_reported.size();
  }
  return {{"runs", runs},
          {"aggregate",
           {{"seeds", outcomes.size()},
            {"min_precision", min_precision},
            {"min_recall", any_recall ? nlohmann::json(min_recall)
                                      : nlohmann::json("n/a")},
            {"genuine_reported", genuine}}}};
}

std::string BenchSummaryText(const std::vector<BenchOutcome>& outcomes) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "seed  candidates  reported  precision  recall\n";
  for (const auto& o : outcomes) {
    out << std::setw(4) << o.seed << "  " << std::setw(10) << o.candidates
        << "  " << std::setw(8) << o.detection.reported << "  "
        << std::setw(9) << o.detection.precision
        << (o.detection.precision_defined ? " " : "*") << " ";
    if (o.detection.recall_defined) {
      out << std::setw(6) << o.detection.recall;
    } else {
      out << "   n/a";
    }
    out << "\n";
  }
  const auto summary = BenchSummaryJson(outcomes)["aggregate"];
  out << "aggregate over " << outcomes.size()
      << " seed(s): min precision " << summary["min_precision"].get<double>()
      << ", min recall ";
  if (summary["min_recall"].is_string()) {
    out << "n/a";
  } else {
    out << summary["min_recall"].get<double>();
  }
  out << ", genuine tokens reported " << summary["genuine_reported"] << "\n";
  if (std::any_of(outcomes.begin(), outcomes.end(), [](const BenchOutcome& o) {
        return !o.detection.precision_defined;
      })) {
    out << "(* precision undefined: empty report)\n";
  }
  return out.str();
}

}  // namespace shortcut
