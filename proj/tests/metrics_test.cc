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

#include "gtest/gtest.h"
#include "oracles.h"
#include "shortcut/errors.h"
#include "test_support.h"

namespace shortcut {
namespace {

using testing::MakeCorpus;

const std::vector<std::string> kNegPos = {"NEG", "POS"};

MatchSet All(size_t n, Split split) {
  MatchSet m;
  m.split = split;
  for (uint32_t i = 0; i < n; ++i) m.examples.push_back(i);
  return m;
}

TEST(MacroF1Test, HandComputedValues) {
  EXPECT_DOUBLE_EQ(MacroF1(std::vector<LabelId>{0, 1, 2, 0},
                           std::vector<LabelId>{0, 1, 2, 0}, 3),
                   100.0);
  EXPECT_NEAR(MacroF1(std::vector<LabelId>{0, 0}, std::vector<LabelId>{0, 1}, 2),
              100.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(MacroF1(std::vector<LabelId>{0, 0, 0},
                           std::vector<LabelId>{0, 0, 0}, 3),
                   100.0);
  EXPECT_DOUBLE_EQ(MicroF1(std::vector<LabelId>{0, 0}, std::vector<LabelId>{0, 1}, 2),
                   50.0);
}

TEST(MacroF1Test, RejectsEmptyOrMismatched) {
  EXPECT_THROW(MacroF1(std::vector<LabelId>{}, std::vector<LabelId>{}, 2),
               AuditError);
  EXPECT_THROW(MacroF1(std::vector<LabelId>{0}, std::vector<LabelId>{0, 1}, 2),
               AuditError);
}

TEST(MetricsTest, GeneralityOfHandEvaluatedMatches) {
  const ToyLexiconModel model = testing::NegPosModel();
  const Corpus ood = MakeCorpus({{{"like"}, 1},
                                 {{"like", "don't", "don't"}, 0},
                                 {{"really", "like"}, 1},
                                 {{"like", "it"}, 1},
                                 {{"don't"}, 0}},
                                kNegPos, Split::kOod);
  const PredictionCache preds = PredictionCache::Compute(ood, model);
  EXPECT_EQ(std::vector<LabelId>(preds.labels().begin(), preds.labels().end()),
            (std::vector<LabelId>{1, 0, 1, 1, 0}));
  const TriggerIndex index = TriggerIndex::Build(ood);
  const MatchSet m = index.FindMatches(TokenSeq{"like"});
  ASSERT_EQ(m.size(), 4u);
  EXPECT_DOUBLE_EQ(Generality({{"like"}, 1}, m, preds), 75.0);
  EXPECT_DOUBLE_EQ(Generality({{"like"}, 0}, m, preds), 25.0);
  EXPECT_THROW(Generality({{"x"}, 1}, MatchSet{}, preds), AuditError);
}

TEST(MetricsTest, IidAccuracyFollowsPredictedLabelDenominator) {
  // Three predicted POS (gold POS, POS, NEG) and two predicted NEG.
  const Corpus iid = MakeCorpus(
      {{{"w"}, 1}, {{"w"}, 1}, {{"w"}, 0}, {{"w"}, 1}, {{"w"}, 0}}, kNegPos,
      Split::kIid);
  const PredictionCache preds(std::vector<LabelId>{1, 1, 1, 0, 0});
  const IidAccuracy acc = ComputeIidAccuracy({{"w"}, 1}, All(5, Split::kIid), iid, preds);
  ASSERT_TRUE(acc.value.has_value());
  EXPECT_NEAR(*acc.value, 200.0 / 3.0, 1e-12);
  EXPECT_EQ(acc.predicted_label, 3u);
  EXPECT_EQ(acc.correct, 2u);

  const PredictionCache none(std::vector<LabelId>{0, 0, 0, 0, 0});
  EXPECT_FALSE(
      ComputeIidAccuracy({{"w"}, 1}, All(5, Split::kIid), iid, none).value);
  const PredictionCache perfect(std::vector<LabelId>{1, 1, 0, 1, 0});
  MatchSet pos;
  pos.examples = {0, 1, 3};
  EXPECT_DOUBLE_EQ(*ComputeIidAccuracy({{"w"}, 1}, pos, iid, perfect).value, 100.0);
  EXPECT_THROW(ComputeIidAccuracy({{"w"}, 1}, MatchSet{}, iid, preds), AuditError);
}

TEST(MetricsTest, DeltaAgainstBaseline) {
  const Corpus ood = MakeCorpus({{{"a"}, 0}, {{"a"}, 1}, {{"b"}, 2}, {{"b"}, 0}},
                                {"x", "y", "z"}, Split::kOod);
  const PredictionCache preds(std::vector<LabelId>{0, 1, 0, 0});
  MatchSet perfect;
  perfect.examples = {0, 1};
  EXPECT_NEAR(DeltaF1(perfect, ood, preds, 60.3), 39.7, 1e-9);
  const double whole = CorpusF1(ood, preds);
  EXPECT_EQ(DeltaF1(All(4, Split::kOod), ood, preds, whole), 0.0);
  EXPECT_THROW(DeltaF1(MatchSet{}, ood, preds, whole), AuditError);
}

TEST(MetricsTest, ComputeStatsMarksUndefinedValues) {
  const ToyLexiconModel model = testing::NegPosModel();
  const Corpus iid = MakeCorpus({{{"like"}, 1}, {{"don't"}, 0}}, kNegPos, Split::kIid);
  const Corpus ood = MakeCorpus({{{"like"}, 0}, {{"it"}, 1}}, kNegPos, Split::kOod);
  const auto ii = TriggerIndex::Build(iid), oi = TriggerIndex::Build(ood);
  const auto ip = PredictionCache::Compute(iid, model);
  const auto op = PredictionCache::Compute(ood, model);
  const ScoringContext ctx{iid, ood, ii, oi, ip, op, CorpusF1(ood, op)};

  const PatternStats unseen = ComputeStats({{"zzz"}, 1}, ctx);
  EXPECT_FALSE(unseen.g);
  EXPECT_FALSE(unseen.delta);
  EXPECT_FALSE(unseen.iid_acc);
  EXPECT_NE(std::find(unseen.undefined.begin(), unseen.undefined.end(),
                      kNoOodMatches),
            unseen.undefined.end());

  const PatternStats wrong = ComputeStats({{"don't"}, 1}, ctx);
  EXPECT_FALSE(wrong.iid_acc);
  EXPECT_NE(std::find(wrong.undefined.begin(), wrong.undefined.end(),
                      kDenominatorZero),
            wrong.undefined.end());

  const PatternStats like = ComputeStats({{"like"}, 1}, ctx);
  EXPECT_DOUBLE_EQ(*like.g, 100.0);
  EXPECT_DOUBLE_EQ(*like.iid_acc, 100.0);
  EXPECT_EQ(like.support_iid, 1u);
  EXPECT_EQ(like.support_ood, 1u);
  EXPECT_EQ(like.n_pred_l_iid, 1u);
}

TEST(MetricsTest, ComputeAllStatsMatchesOracle) {
  Rng rng(29);
  const auto vocab = testing::Vocabulary(8);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + static_cast<int>(rng.Below(2));
    const ToyLexiconModel model = testing::RandomModel(rng, vocab, k);
    std::vector<std::string> labels;
    for (int c = 0; c < k; ++c) labels.push_back("l" + std::to_string(c));
    std::vector<std::pair<TokenSeq, LabelId>> irows, orows;
    for (int i = 0; i < 40; ++i) {
      irows.push_back({testing::RandomTokens(rng, vocab, 1, 6), static_cast<LabelId>(rng.Below(k))});
      orows.push_back({testing::RandomTokens(rng, vocab, 1, 6), static_cast<LabelId>(rng.Below(k))});
    }
    const Corpus iid = MakeCorpus(irows, labels, Split::kIid);
    const Corpus ood = MakeCorpus(orows, labels, Split::kOod);
    const auto ii = TriggerIndex::Build(iid), oi = TriggerIndex::Build(ood);
    const auto ip = PredictionCache::Compute(iid, model, 2);
    const auto op = PredictionCache::Compute(ood, model, 3);
    const F1Variant variant = trial % 4 == 3 ? F1Variant::kMicro : F1Variant::kMacro;
    const ScoringContext ctx{iid, ood, ii, oi, ip, op, CorpusF1(ood, op, variant),
                             variant};
    std::vector<InferencePattern> patterns;
    for (int p = 0; p < 10; ++p) {
      patterns.push_back({testing::RandomTokens(rng, vocab, 1, 2),
                          static_cast<LabelId>(rng.Below(k))});
    }
    const auto stats = ComputeAllStats(patterns, ctx, 3);
    const oracle::LinearModel ref = testing::ToOracle(model);
    std::vector<oracle::Tokens> it, ot;
    std::vector<int> ig, og, ipred, opred;
    for (const auto& e : iid.examples) {
      it.push_back(e.tokens);
      ig.push_back(e.gold_label);
      ipred.push_back(ref.Predict(e.tokens));
    }
    for (const auto& e : ood.examples) {
      ot.push_back(e.tokens);
      og.push_back(e.gold_label);
      opred.push_back(ref.Predict(e.tokens));
    }
    for (size_t p = 0; p < patterns.size(); ++p) {
      const auto want = oracle::PatternStats(patterns[p].trigger, patterns[p].label,
                                             it, ig, ipred, ot, og, opred, k,
                                             variant == F1Variant::kMicro);
      const auto& got = stats[p];
      EXPECT_EQ(got.pattern, patterns[p]);
      EXPECT_EQ(got.support_iid, want.support_iid);
      EXPECT_EQ(got.support_ood, want.support_ood);
      EXPECT_EQ(got.n_pred_l_iid, want.n_pred_l_iid);
      ASSERT_EQ(got.g.has_value(), want.g.has_value());
      ASSERT_EQ(got.iid_acc.has_value(), want.iid_acc.has_value());
      ASSERT_EQ(got.delta.has_value(), want.delta.has_value());
      if (want.g) EXPECT_NEAR(*got.g, *want.g, 1e-9);
      if (want.iid_acc) EXPECT_NEAR(*got.iid_acc, *want.iid_acc, 1e-9);
      if (want.delta) EXPECT_NEAR(*got.delta, *want.delta, 1e-9);
    }
  }
}

TEST(MetricsTest, GeneralityInvariantUnderOrderAndDuplication) {
  const ToyLexiconModel model = testing::NegPosModel();
  std::vector<std::pair<TokenSeq, LabelId>> rows = {
      {{"like"}, 1}, {{"like", "don't", "don't"}, 0}, {{"x", "like"}, 1}};
  auto run = [&](const std::vector<std::pair<TokenSeq, LabelId>>& r) {
    const Corpus c = MakeCorpus(r, kNegPos, Split::kOod);
    const auto preds = PredictionCache::Compute(c, model);
    return Generality({{"like"}, 1},
                      TriggerIndex::Build(c).FindMatches(TokenSeq{"like"}), preds);
  };
  const double g = run(rows);
  auto reversed = rows;
  std::reverse(reversed.begin(), reversed.end());
  auto doubled = rows;
  doubled.insert(doubled.end(), rows.begin(), rows.end());
  EXPECT_DOUBLE_EQ(run(reversed), g);
  EXPECT_DOUBLE_EQ(run(doubled), g);
}

TEST(F1VariantTest, ParseAndName) {
  EXPECT_EQ(ParseF1Variant("macro"), F1Variant::kMacro);
  EXPECT_EQ(ParseF1Variant("micro"), F1Variant::kMicro);
  EXPECT_STREQ(F1VariantName(F1Variant::kMicro), "micro");
  EXPECT_THROW(ParseF1Variant("weighted"), AuditError);
}

}  // namespace
}  // namespace shortcut
