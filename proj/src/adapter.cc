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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "shortcut/errors.h"
#include "shortcut/hash.h"

namespace shortcut {

std::string Fingerprint::Hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(state_));
  return buf;
}

LabelId ArgmaxLowest(std::span<const double> values) {
  LabelId best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<LabelId>(i);
  }
  return best;
}

std::vector<double> Softmax(std::span<const double> scores,
                            double temperature) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const double max = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp((scores[i] - max) / temperature);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

Prediction ModelAdapter::Predict(const TokenSeq& input) const {
  return PredictBatch(std::span<const TokenSeq>(&input, 1)).at(0);
}

AttributionVector ModelAdapter::Attribute(const TokenSeq& input) const {
  return AttributeBatch(std::span<const TokenSeq>(&input, 1)).at(0);
}

TokenSeq WhitespaceTokenize(const std::string& text) {
  TokenSeq tokens;
  std::istringstream in(text);
  Token token;
  while (in >> token) tokens.push_back(std::move(token));
  return tokens;
}

ToyLexiconModel::ToyLexiconModel(int label_count, std::vector<double> bias,
                                 Token mask_token, double temperature,
                                 size_t batch_size)
    : label_count_(label_count),
      bias_(std::move(bias)),
      mask_token_(std::move(mask_token)),
      temperature_(temperature),
      batch_size_(batch_size) {
  if (label_count_ < 1) {
    throw AuditError(ErrorKind::kConfig, "label_count must be positive");
  }
  if (bias_.empty()) bias_.assign(label_count_, 0.0);
  if (bias_.size() != static_cast<size_t>(label_count_)) {
    throw AuditError(ErrorKind::kConfig,
                     "bias length does not match label_count");
  }
  if (!(temperature_ > 0.0)) {
    throw AuditError(ErrorKind::kConfig, "temperature must be positive");
  }
  if (batch_size_ == 0) {
    throw AuditError(ErrorKind::kConfig, "batch_size must be positive");
  }
  if (mask_token_.empty()) {
    throw AuditError(ErrorKind::kConfig, "mask token must be non-empty");
  }
}

void ToyLexiconModel::SetWeight(const Token& token,
                                std::vector<double> weight) {
  if (token == mask_token_) {
    throw AuditError(ErrorKind::kConfig, "the mask token carries no weight");
  }
  if (weight.size() != static_cast<size_t>(label_count_)) {
    throw AuditError(ErrorKind::kConfig,
                     "weight for '" + token + "' has wrong length");
  }
  for (double w : weight) {
    if (!std::isfinite(w)) {
      throw AuditError(ErrorKind::kConfig,
                       "non-finite weight for '" + token + "'");
    }
  }
  weights_[token] = std::move(weight);
}

const std::vector<double>* ToyLexiconModel::FindWeight(
    const Token& token) const {
  auto it = weights_.find(token);
  return it == weights_.end() ? nullptr : &it->second;
}

std::vector<double> ToyLexiconModel::Scores(
    std::span<const Token> tokens) const {
  std::vector<double> scores = bias_;
  for (const Token& token : tokens) {
    if (const auto* w = FindWeight(token)) {
      for (int c = 0; c < label_count_; ++c) scores[c] += (*w)[c];
    }
  }
  return scores;
}

std::string ToyLexiconModel::identity() const {
  Fingerprint fp;
  fp.Update(ToJson().dump());
  return name_ + "@" + fp.Hex();
}

std::vector<TokenSeq> ToyLexiconModel::Tokenize(
    std::span<const std::string> texts) const {
  std::vector<TokenSeq> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(WhitespaceTokenize(text));
  return out;
}

std::vector<Prediction> ToyLexiconModel::PredictBatch(
    std::span<const TokenSeq> inputs) const {
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  for (const auto& input : inputs) {
    const std::vector<double> scores = Scores(input);
    out.push_back({ArgmaxLowest(scores), Softmax(scores, temperature_)});
  }
  return out;
}

std::vector<AttributionVector> ToyLexiconModel::AttributeBatch(
    std::span<const TokenSeq> inputs) const {
  std::vector<AttributionVector> out;
  out.reserve(inputs.size());
  for (const auto& input : inputs) {
    const LabelId predicted = ArgmaxLowest(Scores(input));
    AttributionVector scores(input.size(), 0.0);
    for (size_t i = 0; i < input.size(); ++i) {
      if (const auto* w = FindWeight(input[i])) scores[i] = (*w)[predicted];
    }
    out.push_back(std::move(scores));
  }
  return out;
}

nlohmann::json ToyLexiconModel::ToJson() const {
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& [token, w] : weights_) weights[token] = w;
  return {{"label_count", label_count_}, {"mask_token", mask_token_},
          {"bias", bias_},               {"temperature", temperature_},
          {"batch_size", batch_size_},   {"name", name_},
          {"weights", weights}};
}

ToyLexiconModel ToyLexiconModel::FromJson(const nlohmann::json& j) {
  try {
    const int label_count = j.at("label_count").get<int>();
    ToyLexiconModel model(label_count,
                          j.value("bias", std::vector<double>{}),
                          j.value("mask_token", std::string("[MASK]")),
                          j.value("temperature", 1.0),
                          j.value("batch_size", size_t{64}));
    model.name_ = j.value("name", std::string("toy-lexicon"));
    for (const auto& [token, w] : j.at("weights").items()) {
      model.SetWeight(token, w.get<std::vector<double>>());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorKind::kConfig,
                     std::string("malformed toy model: ") + e.what());
  }
}

ToyLexiconModel ToyLexiconModel::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw AuditError(ErrorKind::kConfig,
                     "cannot open model weights " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorKind::kConfig, "malformed JSON in " +
                                             path.string() + ": " + e.what());
  }
  return FromJson(j);
}

void ToyLexiconModel::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw AuditError(ErrorKind::kConfig, "cannot write " + path.string());
  }
  out << ToJson().dump(2) << "\n";
}

}  // namespace shortcut
