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

#include "shortcut/synthbench.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "shortcut/errors.h"
#include "shortcut/random.h"

namespace shortcut {
namespace {

[[noreturn]] void ConfigFail(const std::string& message) {
  throw AuditError(ErrorKind::kConfig, "bench spec: " + message);
}

std::string FillerToken(size_t i) { return "w" + std::to_string(i); }

std::string CueToken(const std::string& label_name, size_t i) {
  return label_name + "_cue" + std::to_string(i);
}

std::vector<double> UniformDist(int label_count) {
  return std::vector<double>(label_count, 1.0 / label_count);
}

// Gold label for a trigger-bearing IID example.
LabelId PlantedIidLabel(Rng& rng, const PlantSpec& plant, int label_count) {
  if (label_count == 1 || rng.Bernoulli(plant.iid_plant_rate)) {
    return plant.planted_label;
  }
  LabelId other = static_cast<LabelId>(rng.Below(label_count - 1));
  if (other >= plant.planted_label) ++other;
  return other;
}

void InsertAt(TokenSeq& seq, size_t pos, Token token) {
  seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(pos), std::move(token));
}

Corpus GenerateSplit(const BenchSpec& spec, Split split, size_t n, Rng& rng) {
  Corpus corpus;
  corpus.label_names = spec.label_names;
  corpus.split = split;
  corpus.source = std::string("synthbench:") + SplitName(split) + ":seed=" +
                  std::to_string(spec.seed);
  const int labels = spec.label_count();

  std::vector<double> plant_weights;
  double trigger_total = 0.0;
  for (const auto& p : spec.plants) {
    plant_weights.push_back(p.trigger_rate);
    trigger_total += p.trigger_rate;
  }

  const std::string prefix = split == Split::kIid ? "iid-" : "ood-";
  for (size_t e = 0; e < n; ++e) {
    TokenSeq tokens;
    const size_t fillers = rng.Between(spec.min_fillers, spec.max_fillers);
    for (size_t i = 0; i < fillers; ++i) {
      tokens.push_back(FillerToken(rng.Below(spec.vocab_size)));
    }

    LabelId gold;
    bool cue;
    if (!spec.plants.empty() && rng.Bernoulli(trigger_total)) {
      const PlantSpec& plant = spec.plants[rng.Categorical(plant_weights)];
      if (split == Split::kIid) {
        gold = PlantedIidLabel(rng, plant, labels);
      } else {
        const auto dist = plant.ood_label_dist.empty() ? UniformDist(labels)
                                                       : plant.ood_label_dist;
        gold = static_cast<LabelId>(rng.Categorical(dist));
      }
      // Trigger tokens keep their order, gaps allowed.
      size_t lo = 0;
      for (const Token& t : plant.trigger) {
        const size_t pos = rng.Between(lo, tokens.size());
        InsertAt(tokens, pos, t);
        lo = pos + 1;
      }
      cue = rng.Bernoulli(plant.cue_rate);
    } else {
      gold = static_cast<LabelId>(rng.Below(labels));
      cue = rng.Bernoulli(spec.genuine_rate);
    }
    if (cue) {
      const size_t which = rng.Below(spec.cues_per_label);
      InsertAt(tokens, rng.Between(0, tokens.size()),
               CueToken(spec.label_names[gold], which));
    }

    LabeledExample ex;
    char id[32];
    std::snprintf(id, sizeof(id), "%s%05zu", prefix.c_str(), e);
    ex.id = id;
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) ex.text += ' ';
      ex.text += tokens[i];
    }
    ex.gold_label = gold;
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

}  // namespace

void BenchSpec::Validate() const {
  const int labels = label_count();
  if (labels < 2) ConfigFail("need at least two labels");
  if (std::set<std::string>(label_names.begin(), label_names.end()).size() !=
      label_names.size()) {
    ConfigFail("label names must be distinct");
  }
  if (n_iid < 200 || n_ood < 200) ConfigFail("corpus sizes must be >= 200");
  if (vocab_size == 0) ConfigFail("vocab_size must be positive");
  if (cues_per_label == 0) ConfigFail("cues_per_label must be positive");
  if (min_fillers > max_fillers) ConfigFail("min_fillers > max_fillers");
  if (genuine_rate < 0.0 || genuine_rate > 1.0) {
    ConfigFail("genuine_rate outside [0,1]");
  }
  if (!(baseline_bias > 0.0)) ConfigFail("baseline_bias must be positive");
  if (!(trigger_weight > baseline_bias)) {
    ConfigFail("trigger_weight must exceed baseline_bias");
  }
  if (!(genuine_weight > trigger_weight)) {
    ConfigFail("genuine_weight must exceed trigger_weight");
  }

  std::set<Token> reserved;
  for (size_t i = 0; i < vocab_size; ++i) reserved.insert(FillerToken(i));
  for (const auto& name : label_names) {
    for (size_t i = 0; i < cues_per_label; ++i) {
      reserved.insert(CueToken(name, i));
    }
  }
  std::set<Token> trigger_tokens;
  double trigger_total = 0.0;
  std::set<LabelId> planted_labels;
  for (const auto& p : plants) {
    if (p.trigger.empty()) ConfigFail("empty trigger");
    if (p.planted_label < 0 || p.planted_label >= labels) {
      ConfigFail("planted label out of range");
    }
    if (!(p.iid_plant_rate > 0.5 && p.iid_plant_rate <= 1.0)) {
      ConfigFail("iid_plant_rate must lie in (0.5, 1]");
    }
    if (!p.ood_label_dist.empty()) {
      if (p.ood_label_dist.size() != static_cast<size_t>(labels)) {
        ConfigFail("ood_label_dist length differs from the label count");
      }
      double total = 0.0;
      for (double v : p.ood_label_dist) {
        if (v < 0.0) ConfigFail("negative probability in ood_label_dist");
        total += v;
      }
      if (std::abs(total - 1.0) > 1e-9) ConfigFail("ood_label_dist must sum to 1");
    }
    if (!(p.trigger_rate > 0.0)) ConfigFail("trigger_rate must be positive");
    if (p.cue_rate < 0.0 || p.cue_rate > 1.0) ConfigFail("cue_rate outside [0,1]");
    trigger_total += p.trigger_rate;
    for (const auto& t : p.trigger) {
      if (reserved.contains(t)) {
        ConfigFail("trigger token '" + t + "' collides with filler or cue");
      }
      if (!trigger_tokens.insert(t).second) {
        ConfigFail("trigger token '" + t + "' is used twice");
      }
    }
    planted_labels.insert(p.planted_label);
  }
  if (trigger_total > 1.0) ConfigFail("trigger rates sum above 1");
  if (planted_labels.size() == static_cast<size_t>(labels)) {
    ConfigFail("every label is planted; one label must stay unplanted so "
               "that masking a trigger can flip the prediction");
  }
}

LabelId BaselineLabel(const BenchSpec& spec) {
  std::set<LabelId> planted;
  for (const auto& p : spec.plants) planted.insert(p.planted_label);
  for (LabelId l = 0; l < spec.label_count(); ++l) {
    if (!planted.contains(l)) return l;
  }
  return 0;
}

double TriggerTokenWeight(const BenchSpec& spec, size_t k) {
  if (k <= 1) return spec.trigger_weight;
  // Whole trigger: b (2k-1)/(2k-2) > b. Any k-1 tokens:
  // b (2k-1)/(2k) < b.
  const double total = std::min(
      spec.trigger_weight,
      spec.baseline_bias * (2.0 * k - 1.0) / (2.0 * k - 2.0));
  return total / static_cast<double>(k);
}

BenchSpec DefaultBenchSpec(uint64_t seed) {
  BenchSpec spec;
  spec.seed = seed;
  spec.plants = {
      {{"spielberg"}, 2, 0.95, {}, 0.12, 0.3},
      {{"is", "always"}, 1, 0.9, {}, 0.12, 0.3},
      {{"soon"}, 1, 0.9, {}, 0.12, 0.3},
  };
  return spec;
}

Benchmark Generate(const BenchSpec& spec) {
  spec.Validate();
  const int labels = spec.label_count();
  std::vector<double> bias(labels, 0.0);
  bias[BaselineLabel(spec)] = spec.baseline_bias;
  ToyLexiconModel model(labels, bias);
  model.set_name("synthbench-seed" + std::to_string(spec.seed));

  GroundTruth truth;
  for (LabelId l = 0; l < labels; ++l) {
    for (size_t i = 0; i < spec.cues_per_label; ++i) {
      const Token cue = CueToken(spec.label_names[l], i);
      std::vector<double> w(labels, 0.0);
      w[l] = spec.genuine_weight;
      model.SetWeight(cue, w);
      truth.genuine_tokens.push_back(cue);
    }
  }
  for (const auto& p : spec.plants) {
    std::vector<double> w(labels, 0.0);
    w[p.planted_label] = TriggerTokenWeight(spec, p.trigger.size());
    for (const auto& t : p.trigger) model.SetWeight(t, w);
    truth.planted.push_back({p.trigger, p.planted_label});
  }

  // Separate streams so that changing one split's size leaves the other
  // split unchanged.
  Rng iid_rng(spec.seed * 2 + 1);
  Rng ood_rng(spec.seed * 2 + 2);
  Corpus iid = GenerateSplit(spec, Split::kIid, spec.n_iid, iid_rng);
  Corpus ood = GenerateSplit(spec, Split::kOod, spec.n_ood, ood_rng);
  return {std::move(iid), std::move(ood), std::move(model), std::move(truth)};
}

DetectionScore EvaluateDetection(const ShortcutReport& report,
                                 const GroundTruth& truth) {
  DetectionScore score;
  score.reported = report.shortcuts.size();
  std::set<Token> genuine(truth.genuine_tokens.begin(),
                          truth.genuine_tokens.end());
  std::vector<bool> matched(report.shortcuts.size(), false);
  for (const auto& plant : truth.planted) {
    PlantOutcome outcome{plant, false, {}};
    for (size_t i = 0; i < report.shortcuts.size(); ++i) {
      const InferencePattern& p = report.shortcuts[i].stats.pattern;
      if (p.label == plant.label && IsSubsequence(plant.trigger, p.trigger)) {
        outcome.recalled = true;
        outcome.matched_by.push_back(p);
        matched[i] = true;
      }
    }
    score.per_plant.push_back(std::move(outcome));
  }
  for (size_t i = 0; i < report.shortcuts.size(); ++i) {
    if (matched[i]) ++score.reported_matched;
    const InferencePattern& p = report.shortcuts[i].stats.pattern;
    if (std::any_of(p.trigger.begin(), p.trigger.end(),
                    [&](const Token& t) { return genuine.contains(t); })) {
      score.genuine_reported.push_back(p);
    }
  }
  if (score.reported > 0) {
    score.precision_defined = true;
    score.precision = static_cast<double>(score.reported_matched) /
                      static_cast<double>(score.reported);
  }
  if (!truth.planted.empty()) {
    score.recall_defined = true;
    const auto recalled = std::count_if(
        score.per_plant.begin(), score.per_plant.end(),
        [](const PlantOutcome& o) { return o.recalled; });
    score.recall = static_cast<double>(recalled) /
                   static_cast<double>(truth.planted.size());
  }
  return score;
}

nlohmann::json BenchSpecToJson(const BenchSpec& spec) {
  nlohmann::json plants = nlohmann::json::array();
  for (const auto& p : spec.plants) {
    plants.push_back({{"trigger", p.trigger},
                      {"planted_label", p.planted_label},
                      {"iid_plant_rate", p.iid_plant_rate},
                      {"ood_label_dist", p.ood_label_dist},
                      {"trigger_rate", p.trigger_rate},
                      {"cue_rate", p.cue_rate}});
  }
  return {{"label_names", spec.label_names},
          {"n_iid", spec.n_iid},
          {"n_ood", spec.n_ood},
          {"vocab_size", spec.vocab_size},
          {"cues_per_label", spec.cues_per_label},
          {"min_fillers", spec.min_fillers},
          {"max_fillers", spec.max_fillers},
          {"genuine_rate", spec.genuine_rate},
          {"genuine_weight", spec.genuine_weight},
          {"trigger_weight", spec.trigger_weight},
          {"baseline_bias", spec.baseline_bias},
          {"seed", spec.seed},
          {"plants", plants}};
}

BenchSpec BenchSpecFromJson(const nlohmann::json& j) {
  BenchSpec spec;
  try {
    if (!j.is_object()) ConfigFail("expected a JSON object");
    spec.label_names = j.value("label_names", spec.label_names);
    spec.n_iid = j.value("n_iid", spec.n_iid);
    spec.n_ood = j.value("n_ood", spec.n_ood);
    spec.vocab_size = j.value("vocab_size", spec.vocab_size);
    spec.cues_per_label = j.value("cues_per_label", spec.cues_per_label);
    spec.min_fillers = j.value("min_fillers", spec.min_fillers);
    spec.max_fillers = j.value("max_fillers", spec.max_fillers);
    spec.genuine_rate = j.value("genuine_rate", spec.genuine_rate);
    spec.genuine_weight = j.value("genuine_weight", spec.genuine_weight);
    spec.trigger_weight = j.value("trigger_weight", spec.trigger_weight);
    spec.baseline_bias = j.value("baseline_bias", spec.baseline_bias);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("plants")) {
      for (const auto& p : j.at("plants")) {
        PlantSpec plant;
        plant.trigger = p.at("trigger").get<TokenSeq>();
        const auto& label = p.at("planted_label");
        if (label.is_string()) {
          const auto name = label.get<std::string>();
          auto it = std::find(spec.label_names.begin(), spec.label_names.end(),
                              name);
          if (it == spec.label_names.end()) {
            ConfigFail("unknown planted label '" + name + "'");
          }
          plant.planted_label =
              static_cast<LabelId>(it - spec.label_names.begin());
        } else {
          plant.planted_label = label.get<LabelId>();
        }
        plant.iid_plant_rate = p.value("iid_plant_rate", plant.iid_plant_rate);
        plant.ood_label_dist =
            p.value("ood_label_dist", std::vector<double>{});
        plant.trigger_rate = p.value("trigger_rate", plant.trigger_rate);
        plant.cue_rate = p.value("cue_rate", plant.cue_rate);
        spec.plants.push_back(std::move(plant));
      }
    } else {
      spec.plants = DefaultBenchSpec(spec.seed).plants;
    }
  } catch (const nlohmann::json::exception& e) {
    ConfigFail(e.what());
  }
  spec.Validate();
  return spec;
}

nlohmann::json GroundTruthToJson(const GroundTruth& truth) {
  nlohmann::json planted = nlohmann::json::array();
  for (const auto& p : truth.planted) planted.push_back(PatternToJson(p));
  return {{"planted", planted}, {"genuine_tokens", truth.genuine_tokens}};
}

GroundTruth GroundTruthFromJson(const nlohmann::json& j) {
  GroundTruth truth;
  try {
    for (const auto& p : j.at("planted")) {
      truth.planted.push_back(PatternFromJson(p));
    }
    truth.genuine_tokens = j.at("genuine_tokens").get<TokenSeq>();
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorKind::kLoad,
                     std::string("malformed ground truth: ") + e.what());
  }
  return truth;
}

nlohmann::json DetectionToJson(const DetectionScore& score) {
  nlohmann::json plants = nlohmann::json::array();
  for (const auto& o : score.per_plant) {
    nlohmann::json by = nlohmann::json::array();
    for (const auto& p : o.matched_by) by.push_back(PatternToJson(p));
    plants.push_back({{"trigger", o.plant.trigger},
                      {"label", o.plant.label},
                      {"recalled", o.recalled},
                      {"matched_by", by}});
  }
  nlohmann::json genuine = nlohmann::json::array();
  for (const auto& p : score.genuine_reported) {
    genuine.push_back(PatternToJson(p));
  }
  return {{"precision", score.precision},
          {"precision_defined", score.precision_defined},
          {"recall", score.recall_defined ? nlohmann::json(score.recall)
                                          : nlohmann::json("n/a")},
          {"recall_defined", score.recall_defined},
          {"reported", score.reported},
          {"reported_matched", score.reported_matched},
          {"per_plant", plants},
          {"genuine_reported", genuine}};
}

}  // namespace shortcut
