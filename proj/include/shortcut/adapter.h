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

// Black-box model contract used by every stage of the audit, and an
// in-process linear lexicon classifier that implements it exactly.

#ifndef SHORTCUT_ADAPTER_H_
#define SHORTCUT_ADAPTER_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "shortcut/pattern.h"

namespace shortcut {

struct Prediction {
  LabelId label = 0;
  std::vector<double> probabilities;
};

// One finite score per input token position.
using AttributionVector = std::vector<double>;

// Index of the largest value; ties go to the lowest index.
LabelId ArgmaxLowest(std::span<const double> values);

// Softmax of scores / temperature, computed with max subtraction.
std::vector<double> Softmax(std::span<const double> scores,
                            double temperature = 1.0);

// Implementations must be safe for concurrent calls from several workers and
// deterministic: the same token sequence always yields the same prediction.
class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;

  virtual int label_count() const = 0;
  virtual const Token& mask_token() const = 0;
  // Largest number of sequences a single batched call should carry.
  virtual size_t batch_size() const = 0;
  // Stable string naming the model and its tokenizer; used to key token
  // caches and recorded in report metadata.
  virtual std::string identity() const = 0;

  virtual std::vector<TokenSeq> Tokenize(
      std::span<const std::string> texts) const = 0;
  virtual std::vector<Prediction> PredictBatch(
      std::span<const TokenSeq> inputs) const = 0;
  // Attribution of each token toward the predicted label's score.
  virtual std::vector<AttributionVector> AttributeBatch(
      std::span<const TokenSeq> inputs) const = 0;

  Prediction Predict(const TokenSeq& input) const;
  AttributionVector Attribute(const TokenSeq& input) const;
};

// Linear bag-of-tokens classifier:
//   score_c(x) = bias_c + sum_{t in x} weights[t][c]
// Unknown tokens and the mask token have zero weight. Integrated gradients of
// this score from an all-mask baseline is exact and equals the per-token
// weight toward the predicted class, so Attribute returns those weights.
class ToyLexiconModel final : public ModelAdapter {
 public:
  ToyLexiconModel(int label_count, std::vector<double> bias,
                  Token mask_token = "[MASK]", double temperature = 1.0,
                  size_t batch_size = 64);

  static ToyLexiconModel FromJson(const nlohmann::json& j);
  static ToyLexiconModel Load(const std::filesystem::path& path);
  nlohmann::json ToJson() const;
  void Save(const std::filesystem::path& path) const;

  // Throws kConfig if the vector length is wrong or the token is the mask.
  void SetWeight(const Token& token, std::vector<double> weight);
  const std::vector<double>* FindWeight(const Token& token) const;

  std::vector<double> Scores(std::span<const Token> tokens) const;
  const std::vector<double>& bias() const { return bias_; }
  double temperature() const { return temperature_; }
  void set_name(std::string name) { name_ = std::move(name); }

  int label_count() const override { return label_count_; }
  const Token& mask_token() const override { return mask_token_; }
  size_t batch_size() const override { return batch_size_; }
  std::string identity() const override;

  // Whitespace tokenizer.
  std::vector<TokenSeq> Tokenize(
      std::span<const std::string> texts) const override;
  std::vector<Prediction> PredictBatch(
      std::span<const TokenSeq> inputs) const override;
  std::vector<AttributionVector> AttributeBatch(
      std::span<const TokenSeq> inputs) const override;

 private:
  int label_count_;
  std::vector<double> bias_;
  Token mask_token_;
  double temperature_;
  size_t batch_size_;
  std::string name_ = "toy-lexicon";
  std::unordered_map<Token, std::vector<double>> weights_;
};

// Splits on ASCII whitespace.
TokenSeq WhitespaceTokenize(const std::string& text);

}  // namespace shortcut

#endif  // SHORTCUT_ADAPTER_H_
