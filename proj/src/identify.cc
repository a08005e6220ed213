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

#include "shortcut/identify.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "shortcut/errors.h"

namespace shortcut {
namespace {

nlohmann::json Optional(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> OptionalFrom(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

std::string Fixed1(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << v;
  return out.str();
}

std::string LabelName(const std::vector<std::string>& names, LabelId label) {
  if (label >= 0 && static_cast<size_t>(label) < names.size()) {
    return names[label];
  }
  return std::to_string(label);
}

}  // namespace

void Thresholds::Validate(int label_count) const {
  if (label_count < 1) {
    throw AuditError(ErrorKind::kConfig, "label_count must be positive");
  }
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2) ||
      !std::isfinite(lambda3)) {
    throw AuditError(ErrorKind::kConfig, "thresholds must be finite");
  }
  const double chance = 100.0 / label_count;
  if (!(lambda2 > chance)) {
    throw AuditError(ErrorKind::kConfig,
                     "lambda2 = " + Fixed1(lambda2) +
                         " must exceed the chance level " + Fixed1(chance));
  }
  if (!(lambda3 < 0.0)) {
    throw AuditError(ErrorKind::kConfig, "lambda3 must be negative");
  }
}

nlohmann::json ThresholdsToJson(const Thresholds& t) {
  return {{"lambda1", t.lambda1},
          {"lambda2", t.lambda2},
          {"lambda3", t.lambda3},
          {"min_support_ood", t.min_support_ood}};
}

Thresholds ThresholdsFromJson(const nlohmann::json& j, Thresholds base) {
  try {
    base.lambda1 = j.value("lambda1", base.lambda1);
    base.lambda2 = j.value("lambda2", base.lambda2);
    base.lambda3 = j.value("lambda3", base.lambda3);
    base.min_support_ood = j.value("min_support_ood", base.min_support_ood);
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorKind::kConfig,
                     std::string("malformed thresholds: ") + e.what());
  }
  return base;
}

std::vector<std::string> RejectionReasons(const PatternStats& s,
                                          const Thresholds& t) {
  std::vector<std::string> reasons;
  if (s.support_ood < t.min_support_ood) reasons.push_back(kReasonSupport);
  if (!s.g || !s.delta) {
    reasons.push_back(kReasonNoOod);
  } else {
    if (!(*s.g > t.lambda1)) reasons.push_back(kReasonGeneralityLow);
    if (!(*s.delta < t.lambda3)) reasons.push_back(kReasonDeltaHigh);
  }
  if (!s.iid_acc) {
    reasons.push_back(kReasonIidUndefined);
  } else if (!(*s.iid_acc > t.lambda2)) {
    reasons.push_back(kReasonIidAccLow);
  }
  return reasons;
}

ShortcutReport Identify(const std::vector<StatsRow>& rows,
                        const Thresholds& thresholds,
                        const std::vector<std::string>& label_names,
                        double baseline_f1_ood) {
  thresholds.Validate(static_cast<int>(label_names.size()));
  ShortcutReport report;
  report.thresholds = thresholds;
  report.baseline_f1_ood = baseline_f1_ood;
  report.label_names = label_names;
  for (const auto& row : rows) {
    auto reasons = RejectionReasons(row.stats, thresholds);
    if (reasons.empty()) {
      report.shortcuts.push_back(row);
    } else {
      report.diagnostics.push_back({row.stats.pattern, std::move(reasons)});
    }
  }
  std::sort(report.shortcuts.begin(), report.shortcuts.end(),
            [](const StatsRow& a, const StatsRow& b) {
              if (*a.stats.g != *b.stats.g) return *a.stats.g > *b.stats.g;
              return a.stats.pattern < b.stats.pattern;
            });
  std::sort(report.diagnostics.begin(), report.diagnostics.end(),
            [](const Diagnostic& a, const Diagnostic& b) {
              return a.pattern < b.pattern;
            });
  return report;
}

nlohmann::json StatsRowToJson(const StatsRow& row) {
  const PatternStats& s = row.stats;
  return {{"trigger", s.pattern.trigger},
          {"label", s.pattern.label},
          {"g", Optional(s.g)},
          {"iid_acc", Optional(s.iid_acc)},
          {"delta", Optional(s.delta)},
          {"support_iid", s.support_iid},
          {"support_ood", s.support_ood},
          {"n_pred_l_iid", s.n_pred_l_iid},
          {"undefined", s.undefined},
          {"extraction_count", row.provenance.extraction_count},
          {"fallback_count", row.provenance.fallback_count},
          {"source_ids", row.provenance.source_ids}};
}

StatsRow StatsRowFromJson(const nlohmann::json& j) {
  StatsRow row;
  try {
    row.stats.pattern = PatternFromJson(j);
    row.stats.g = OptionalFrom(j, "g");
    row.stats.iid_acc = OptionalFrom(j, "iid_acc");
    row.stats.delta = OptionalFrom(j, "delta");
    row.stats.support_iid = j.at("support_iid").get<size_t>();
    row.stats.support_ood = j.at("support_ood").get<size_t>();
    row.stats.n_pred_l_iid = j.value("n_pred_l_iid", size_t{0});
    row.stats.undefined = j.value("undefined", std::vector<std::string>{});
    row.provenance.extraction_count = j.value("extraction_count", size_t{0});
    row.provenance.fallback_count = j.value("fallback_count", size_t{0});
    row.provenance.source_ids =
        j.value("source_ids", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorKind::kLoad,
                     std::string("malformed stats row: ") + e.what());
  }
  return row;
}

nlohmann::json ReportToJson(const ShortcutReport& report) {
  nlohmann::json shortcuts = nlohmann::json::array();
  for (const auto& row : report.shortcuts) {
    const PatternStats& s = row.stats;
    shortcuts.push_back(
        {{"trigger", s.pattern.trigger},
         {"label", s.pattern.label},
         {"label_name", LabelName(report.label_names, s.pattern.label)},
         {"g", *s.g},
         {"iid_acc", *s.iid_acc},
         {"delta", *s.delta},
         {"support_iid", s.support_iid},
         {"support_ood", s.support_ood},
         {"extraction_count", row.provenance.extraction_count}});
  }
  nlohmann::json diagnostics = nlohmann::json::array();
  for (const auto& d : report.diagnostics) {
    diagnostics.push_back({{"trigger", d.pattern.trigger},
                           {"label", d.pattern.label},
                           {"reasons", d.reasons}});
  }
  nlohmann::json config = report.metadata;
  config["thresholds"] = ThresholdsToJson(report.thresholds);
  config["lambda3_unit_scale_literal"] = kLambda3LiteralUnitScale;
  config["label_names"] = report.label_names;
  return {{"config", config},
          {"baseline_f1_ood", report.baseline_f1_ood},
          {"shortcuts", shortcuts},
          {"diagnostics", diagnostics}};
}

ShortcutReport ReportFromJson(const nlohmann::json& j) {
  ShortcutReport report;
  try {
    const auto& config = j.at("config");
    report.thresholds = ThresholdsFromJson(config.at("thresholds"));
    report.label_names = config.at("label_names").get<std::vector<std::string>>();
    report.metadata = config;
    report.metadata.erase("thresholds");
    report.metadata.erase("label_names");
    report.metadata.erase("lambda3_unit_scale_literal");
    report.baseline_f1_ood = j.at("baseline_f1_ood").get<double>();
    for (const auto& s : j.at("shortcuts")) {
      StatsRow row;
      row.stats.pattern = PatternFromJson(s);
      row.stats.g = s.at("g").get<double>();
      row.stats.iid_acc = s.at("iid_acc").get<double>();
      row.stats.delta = s.at("delta").get<double>();
      row.stats.support_iid = s.at("support_iid").get<size_t>();
      row.stats.support_ood = s.at("support_ood").get<size_t>();
      row.provenance.extraction_count = s.at("extraction_count").get<size_t>();
      report.shortcuts.push_back(std::move(row));
    }
    for (const auto& d : j.at("diagnostics")) {
      report.diagnostics.push_back(
          {PatternFromJson(d), d.at("reasons").get<std::vector<std::string>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorKind::kLoad,
                     std::string("malformed report: ") + e.what());
  }
  return report;
}

std::string ReportToMarkdown(const ShortcutReport& report) {
  std::ostringstream out;
  out << "# Shortcut report\n\n";
  out << "Baseline OOD F1: " << Fixed1(report.baseline_f1_ood) << "  \n";
  const Thresholds& t = report.thresholds;
  out << "Thresholds: g > " << Fixed1(t.lambda1) << ", iid_acc > "
      << Fixed1(t.lambda2) << ", delta < " << Fixed1(t.lambda3)
      << ", |E_OOD| >= " << t.min_support_ood << "\n\n";
  if (report.shortcuts.empty()) {
    out << "No shortcut patterns passed the thresholds.\n";
  } else {
    out << "| pattern | g | iid_acc | delta | \\|E_IID(w)\\| | "
           "\\|E_OOD(w)\\| | extractions |\n";
    out << "|---|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& row : report.shortcuts) {
      const PatternStats& s = row.stats;
      std::string trigger = FormatTrigger(s.pattern.trigger);
      // Escape pipes so the table stays well-formed.
      std::string escaped;
      for (char c : trigger) {
        if (c == '|') escaped += '\\';
        escaped += c;
      }
      out << "| " << escaped << " -> "
          << LabelName(report.label_names, s.pattern.label) << " | "
          << Fixed1(*s.g) << " | " << Fixed1(*s.iid_acc) << " | "
          << Fixed1(*s.delta) << " | " << s.support_iid << " | "
          << s.support_ood << " | " << row.provenance.extraction_count
          << " |\n";
    }
  }
  out << "\n" << report.diagnostics.size()
      << " candidate pattern(s) excluded; see the JSON report for reasons.\n";
  return out.str();
}

}  // namespace shortcut
