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

#include "shortcut/adapter.h"

#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "shortcut/errors.h"
#include "test_support.h"

namespace shortcut {
namespace {

using testing::NegPosModel;

constexpr LabelId kNeg = 0;
constexpr LabelId kPos = 1;

TEST(ToyLexiconModelTest, PredictsByLinearScore) {
  const ToyLexiconModel model = NegPosModel();
  EXPECT_EQ(model.Predict({"i", "don't", "like", "it"}).label, kPos);
  EXPECT_EQ(model.Predict({"don't", "don't", "like"}).label, kNeg);
  EXPECT_EQ(model.Scores(TokenSeq{"i", "don't", "like", "it"}),
            (std::vector<double>{2.0, 3.0}));
}

TEST(ToyLexiconModelTest, AllMaskTieGoesToLowestLabel) {
  const ToyLexiconModel model = NegPosModel();
  const Prediction p = model.Predict({"[MASK]", "[MASK]", "[MASK]", "[MASK]"});
  EXPECT_EQ(p.label, kNeg);
  EXPECT_DOUBLE_EQ(p.probabilities[0], 0.5);
  EXPECT_DOUBLE_EQ(p.probabilities[1], 0.5);
}

TEST(ToyLexiconModelTest, AttributionIsWeightTowardPredictedLabel) {
  const ToyLexiconModel model = NegPosModel();
  EXPECT_EQ(model.Attribute({"i", "don't", "like", "it"}),
            (AttributionVector{0, 0, 3, 0}));
  EXPECT_EQ(model.Attribute({"[MASK]", "[MASK]"}), (AttributionVector{0, 0}));
  EXPECT_EQ(model.Attribute({"like"}), (AttributionVector{3}));
}

TEST(ToyLexiconModelTest, ProbabilitiesAreNormalized) {
  const ToyLexiconModel model = NegPosModel();
  for (const TokenSeq& x : {TokenSeq{"like"}, TokenSeq{"don't", "x"},
                            TokenSeq{"like", "like", "don't"}}) {
    const Prediction p = model.Predict(x);
    ASSERT_EQ(p.probabilities.size(), 2u);
    const double sum =
        std::accumulate(p.probabilities.begin(), p.probabilities.end(), 0.0);
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_EQ(p.label, ArgmaxLowest(p.probabilities));
  }
}

TEST(ToyLexiconModelTest, LinearCompletenessAndBatchingProperties) {
  Rng rng(7);
  const auto vocab = testing::Vocabulary(30);
  for (int trial = 0; trial < 50; ++trial) {
    const ToyLexiconModel model = testing::RandomModel(rng, vocab, 3);
    std::vector<TokenSeq> xs;
    for (int i = 0; i < 8; ++i) xs.push_back(testing::RandomTokens(rng, vocab, 1, 9));
    const auto batch = model.PredictBatch(xs);
    const auto attrs = model.AttributeBatch(xs);
    for (size_t i = 0; i < xs.size(); ++i) {
      const Prediction single = model.Predict(xs[i]);
      EXPECT_EQ(batch[i].label, single.label);
      EXPECT_EQ(batch[i].probabilities, single.probabilities);
      const auto scores = model.Scores(xs[i]);
      const double total =
          std::accumulate(attrs[i].begin(), attrs[i].end(), 0.0) +
          model.bias()[single.label];
      EXPECT_DOUBLE_EQ(total, scores[single.label]);
      // Masking one position removes exactly that token's weight.
      TokenSeq masked = xs[i];
      masked[0] = model.mask_token();
      const auto after = model.Scores(masked);
      const auto* w = model.FindWeight(xs[i][0]);
      for (int c = 0; c < 3; ++c) {
        EXPECT_DOUBLE_EQ(scores[c] - after[c], w ? (*w)[c] : 0.0);
      }
    }
  }
}

TEST(ToyLexiconModelTest, RejectsBadWeights) {
  ToyLexiconModel model(2, {0.0, 0.0});
  EXPECT_THROW(model.SetWeight("[MASK]", {1.0, 0.0}), AuditError);
  EXPECT_THROW(model.SetWeight("a", {1.0}), AuditError);
  EXPECT_THROW(model.SetWeight("a", {NAN, 0.0}), AuditError);
  EXPECT_THROW(ToyLexiconModel(2, {0.0}), AuditError);
}

TEST(ToyLexiconModelTest, JsonRoundTripPreservesIdentity) {
  ToyLexiconModel model = NegPosModel();
  model.set_name("neg-pos");
  const ToyLexiconModel copy = ToyLexiconModel::FromJson(model.ToJson());
  EXPECT_EQ(copy.identity(), model.identity());
  EXPECT_EQ(copy.ToJson(), model.ToJson());
  EXPECT_EQ(model.identity().rfind("neg-pos@", 0), 0u);
}

TEST(ToyLexiconModelTest, MalformedJsonIsConfigError) {
  try {
    ToyLexiconModel::FromJson({{"weights", {}}});
    FAIL();
  } catch (const AuditError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(AdapterHelpersTest, ArgmaxAndSoftmax) {
  EXPECT_EQ(ArgmaxLowest(std::vector<double>{1, 3, 3}), 1);
  EXPECT_EQ(ArgmaxLowest(std::vector<double>{2, 2, 2}), 0);
  const auto p = Softmax(std::vector<double>{1000.0, 1000.0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  const auto q = Softmax(std::vector<double>{0.0, std::log(3.0)});
  EXPECT_NEAR(q[1], 0.75, 1e-12);
}

TEST(AdapterHelpersTest, WhitespaceTokenize) {
  EXPECT_EQ(WhitespaceTokenize("i like it"), (TokenSeq{"i", "like", "it"}));
  EXPECT_EQ(WhitespaceTokenize("  a\tb\n "), (TokenSeq{"a", "b"}));
  EXPECT_TRUE(WhitespaceTokenize("").empty());
}

}  // namespace
}  // namespace shortcut
