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

#ifndef SHORTCUT_IDENTIFY_H_
#define SHORTCUT_IDENTIFY_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "shortcut/metrics.h"
#include "shortcut/miner.h"

namespace shortcut {

// A pattern is reported as a shortcut iff
//   g > lambda1, iid_acc > lambda2, delta < lambda3,
//   support_ood >= min_support_ood.
// All thresholds are in percentage points.
struct Thresholds {
  double lambda1 = 50.0;
  double lambda2 = 70.0;
  double lambda3 = -5.0;
  size_t min_support_ood = 100;

  // lambda2 must beat chance (100 / label_count) and lambda3 must be
  // negative. Throws kConfig.
  void Validate(int label_count) const;
};

// lambda3 written on a [0,1] F1 scale. Recorded in
// report metadata next to the percentage-point value actually applied.
inline constexpr double kLambda3LiteralUnitScale = -0.05;

nlohmann::json ThresholdsToJson(const Thresholds& t);
Thresholds ThresholdsFromJson(const nlohmann::json& j, Thresholds base = {});

// One scored candidate: a row of the score stage output.
struct StatsRow {
  PatternStats stats;
  Provenance provenance;
};

// Reason codes for patterns left out of the report.
inline constexpr char kReasonSupport[] = "support_ood_below_min";
inline constexpr char kReasonNoOod[] = "g_undefined_no_ood_matches";
inline constexpr char kReasonIidUndefined[] = "iid_acc_undefined";
inline constexpr char kReasonGeneralityLow[] = "g_not_above_lambda1";
inline constexpr char kReasonIidAccLow[] = "iid_acc_not_above_lambda2";
inline constexpr char kReasonDeltaHigh[] = "delta_not_below_lambda3";

struct Diagnostic {
  InferencePattern pattern;
  std::vector<std::string> reasons;
};

struct ShortcutReport {
  std::vector<StatsRow> shortcuts;  // sorted by g descending
  std::vector<Diagnostic> diagnostics;
  Thresholds thresholds;
  double baseline_f1_ood = 0.0;
  std::vector<std::string> label_names;
  nlohmann::json metadata = nlohmann::json::object();
};

// Applies the support filter and the strict threshold tests. Ties on g are
// ordered by (trigger, label). Throws kConfig for invalid thresholds before
// looking at any row.
ShortcutReport Identify(const std::vector<StatsRow>& rows,
                        const Thresholds& thresholds,
                        const std::vector<std::string>& label_names,
                        double baseline_f1_ood);

// Every reason the row fails; empty iff it is a shortcut.
std::vector<std::string> RejectionReasons(const PatternStats& stats,
                                          const Thresholds& thresholds);

nlohmann::json StatsRowToJson(const StatsRow& row);
StatsRow StatsRowFromJson(const nlohmann::json& j);

nlohmann::json ReportToJson(const ShortcutReport& report);
ShortcutReport ReportFromJson(const nlohmann::json& j);
// Markdown table with trigger, label, g, iid_acc, delta and support columns.
std::string ReportToMarkdown(const ShortcutReport& report);

}  // namespace shortcut

#endif  // SHORTCUT_IDENTIFY_H_
