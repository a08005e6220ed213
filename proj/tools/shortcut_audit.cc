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

// shortcut-audit: mine, score and identify shortcut patterns of a text
// classifier; run the synthetic benchmark; render reports.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shortcut/errors.h"
#include "shortcut/pipeline.h"
#include "spdlog/spdlog.h"

namespace fs = std::filesystem;
using namespace shortcut;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<size_t> workers;
  std::optional<size_t> n_samples;
  std::optional<double> lambda1, lambda2, lambda3;
  std::optional<size_t> min_support;
  std::optional<std::string> out_dir;
  std::optional<std::string> f1;
  bool include_fallback = false;
  bool contiguous = false;
};

void AddRunFlags(CLI::App* cmd, Overrides* o, bool needs_config = true) {
  auto* config = cmd->add_option("--config", o->config_path, "Run config (JSON)");
  if (needs_config) config->required();
  cmd->add_option("--seed", o->seed, "Sampling seed");
  cmd->add_option("--workers", o->workers, "Worker threads");
  cmd->add_option("--n-samples", o->n_samples, "IID examples to reduce");
  cmd->add_option("--lambda1", o->lambda1, "Generality threshold (pp)");
  cmd->add_option("--lambda2", o->lambda2, "IID accuracy threshold (pp)");
  cmd->add_option("--lambda3", o->lambda3, "OOD F1 drop threshold (pp)");
  cmd->add_option("--min-support", o->min_support, "Minimum OOD matches");
  cmd->add_option("--out", o->out_dir, "Output directory");
  cmd->add_option("--f1", o->f1, "F1 variant: macro or micro");
  cmd->add_flag("--include-fallback", o->include_fallback,
                "Keep patterns from reductions that never flipped");
  cmd->add_flag("--contiguous-match", o->contiguous,
                "Match triggers as contiguous spans");
}

void ApplyThresholds(const Overrides& o, Thresholds* t) {
  if (o.lambda1) t->lambda1 = *o.lambda1;
  if (o.lambda2) t->lambda2 = *o.lambda2;
  if (o.lambda3) t->lambda3 = *o.lambda3;
  if (o.min_support) t->min_support_ood = *o.min_support;
}

RunConfig ResolveConfig(const Overrides& o) {
  RunConfig c = LoadRunConfig(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (o.n_samples) c.n_samples = *o.n_samples;
  if (o.out_dir) c.output_dir = *o.out_dir;
  if (o.f1) c.f1 = ParseF1Variant(*o.f1);
  if (o.include_fallback) c.include_fallback = true;
  if (o.contiguous) c.match_mode = MatchMode::kContiguous;
  ApplyThresholds(o, &c.thresholds);
  return c;
}

int ReportIncomplete(const CandidateSet& candidates, const fs::path& dir) {
  std::cerr << "error: " << candidates.failed_ids.size()
            << " reductions failed (" << candidates.error_summary
            << "); partial results in " << dir.string()
            << ", rerun with --resume\n";
  return ExitCodeFor(ErrorKind::kTransport);
}

int CmdMine(const Overrides& o, bool resume,
            const std::optional<std::string>& trace) {
  const RunConfig config = ResolveConfig(o);
  config.Validate();
  const auto adapter = MakeAdapter(config);
  std::optional<fs::path> trace_path;
  if (trace) trace_path = *trace;
  const MineStageResult r = RunMineStage(config, *adapter, resume, trace_path);
  std::cout << "mined " << r.candidates.patterns.size() << " candidate patterns"
            << " from " << r.candidates.reductions << " reductions";
  if (r.resumed) std::cout << " (" << r.resumed << " resumed)";
  std::cout << " -> " << (config.output_dir / kCandidatesFile).string() << "\n";
  if (!r.candidates.complete()) {
    return ReportIncomplete(r.candidates, config.output_dir);
  }
  return 0;
}

int CmdScore(const Overrides& o, const std::optional<std::string>& path) {
  const RunConfig config = ResolveConfig(o);
  config.Validate();
  const fs::path candidates =
      path ? fs::path(*path) : config.output_dir / kCandidatesFile;
  if (!fs::exists(candidates)) {
    throw AuditError(ErrorKind::kConfig,
                     "missing candidates file " + candidates.string());
  }
  const auto adapter = MakeAdapter(config);
  const ScoredCandidates scored = RunScoreStage(config, *adapter, candidates);
  std::cout << "scored " << scored.rows.size() << " patterns, baseline OOD F1 "
            << scored.baseline_f1_ood << " -> "
            << (config.output_dir / kStatsFile).string() << "\n";
  return 0;
}

int CmdIdentify(const Overrides& o, const std::optional<std::string>& path) {
  const RunConfig config = ResolveConfig(o);
  const fs::path stats = path ? fs::path(*path) : config.output_dir / kStatsFile;
  const ShortcutReport report = RunIdentifyStage(config, stats);
  std::cout << report.shortcuts.size() << " shortcut pattern(s) reported -> "
            << (config.output_dir / kReportJsonFile).string() << "\n";
  return 0;
}

int CmdRun(const Overrides& o, bool resume) {
  const RunConfig config = ResolveConfig(o);
  config.Validate();
  const auto adapter = MakeAdapter(config);
  const MineStageResult mined = RunMineStage(config, *adapter, resume);
  if (!mined.candidates.complete()) {
    return ReportIncomplete(mined.candidates, config.output_dir);
  }
  RunScoreStage(config, *adapter, config.output_dir / kCandidatesFile);
  const ShortcutReport report =
      RunIdentifyStage(config, config.output_dir / kStatsFile);
  std::cout << ReportToMarkdown(report);
  return 0;
}

int CmdBench(const Overrides& o, const std::optional<std::string>& spec_path,
             size_t sweep, const std::optional<std::string>& summary_path) {
  BenchSpec spec;
  if (spec_path) {
    spec = BenchSpecFromJson(ReadJsonFile(*spec_path));
  } else {
    spec = DefaultBenchSpec(o.seed.value_or(0));
  }
  if (o.seed) spec.seed = *o.seed;
  spec.Validate();
  BenchOptions options;
  if (o.n_samples) options.n_samples = *o.n_samples;
  if (o.workers) options.workers = *o.workers;
  if (o.f1) options.f1 = ParseF1Variant(*o.f1);
  options.include_fallback = o.include_fallback;
  if (o.contiguous) options.match_mode = MatchMode::kContiguous;
  ApplyThresholds(o, &options.thresholds);
  options.thresholds.Validate(static_cast<int>(spec.label_names.size()));

  std::vector<BenchOutcome> outcomes;
  const size_t runs = sweep == 0 ? 1 : sweep;
  for (size_t i = 0; i < runs; ++i) {
    BenchSpec s = spec;
    s.seed = spec.seed + i;
    if (o.out_dir) {
      options.output_dir = fs::path(*o.out_dir) / ("seed-" + std::to_string(s.seed));
    }
    outcomes.push_back(RunBench(s, options));
  }
  std::cout << BenchSummaryText(outcomes);
  const nlohmann::json summary = BenchSummaryJson(outcomes);
  if (summary_path) {
    WriteFile(*summary_path, summary.dump(2) + "\n");
  } else if (o.out_dir) {
    WriteFile(fs::path(*o.out_dir) / "summary.json", summary.dump(2) + "\n");
  }
  return 0;
}

int CmdReport(const std::string& input, const std::optional<std::string>& out) {
  const ShortcutReport report = ReportFromJson(ReadJsonFile(input));
  const std::string markdown = ReportToMarkdown(report);
  if (out) {
    WriteFile(*out, markdown);
  } else {
    std::cout << markdown;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect shortcut reasoning in text classifiers"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  Overrides mine_o, score_o, identify_o, run_o, bench_o;
  bool mine_resume = false, run_resume = false;
  std::optional<std::string> trace, candidates, stats, spec, summary, report_out;
  std::string report_in;
  size_t sweep = 0;

  auto* mine = app.add_subcommand("mine", "Reduce sampled IID examples to candidate patterns");
  AddRunFlags(mine, &mine_o);
  mine->add_flag("--resume", mine_resume, "Reuse extractions from a previous partial run");
  mine->add_option("--trace", trace, "Write per-example masking traces (JSONL)");

  auto* score = app.add_subcommand("score", "Compute pattern statistics");
  AddRunFlags(score, &score_o);
  score->add_option("--candidates", candidates, "Candidates file");

  auto* identify = app.add_subcommand("identify", "Apply thresholds and write the report");
  AddRunFlags(identify, &identify_o);
  identify->add_option("--stats", stats, "Stats file");

  auto* run = app.add_subcommand("run", "mine, score and identify in sequence");
  AddRunFlags(run, &run_o);
  run->add_flag("--resume", run_resume, "Reuse extractions from a previous partial run");

  auto* bench = app.add_subcommand("bench", "Run the planted-shortcut benchmark");
  AddRunFlags(bench, &bench_o, /*needs_config=*/false);
  bench->add_option("--spec", spec, "Benchmark spec (JSON); default spec if absent");
  bench->add_option("--sweep", sweep, "Number of consecutive seeds to run");
  bench->add_option("--summary", summary, "Write the summary JSON here");

  auto* report = app.add_subcommand("report", "Render a report JSON as markdown");
  report->add_option("--input", report_in, "report.json")->required();
  report->add_option("--out", report_out, "Markdown output; stdout if absent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ExitCodeFor(ErrorKind::kConfig);
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    if (*mine) return CmdMine(mine_o, mine_resume, trace);
    if (*score) return CmdScore(score_o, candidates);
    if (*identify) return CmdIdentify(identify_o, stats);
    if (*run) return CmdRun(run_o, run_resume);
    if (*bench) return CmdBench(bench_o, spec, sweep, summary);
    if (*report) return CmdReport(report_in, report_out);
  } catch (const AuditError& e) {
    std::cerr << "error (" << ErrorKindName(e.kind()) << "): " << e.what()
              << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(ErrorKind::kConfig);
  }
  return 0;
}
