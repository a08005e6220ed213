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

#include "shortcut/wire_protocol.h"

#include <cmath>

#include "shortcut/errors.h"

namespace shortcut::wire {
namespace {

[[noreturn]] void Fail(const std::string& what) {
  throw AuditError(ErrorKind::kProtocol, what);
}

const nlohmann::json& ArrayField(const nlohmann::json& body, const char* key,
                                 size_t expected_count) {
  if (!body.is_object() || !body.contains(key) || !body[key].is_array()) {
    Fail(std::string("response lacks array field '") + key + "'");
  }
  const auto& arr = body[key];
  if (arr.size() != expected_count) {
    Fail(std::string("'") + key + "' has " + std::to_string(arr.size()) +
         " entries, expected " + std::to_string(expected_count));
  }
  return arr;
}

TokenSeq ParseTokenList(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) Fail(std::string(what) + " is not an array");
  TokenSeq out;
  out.reserve(j.size());
  for (const auto& t : j) {
    if (!t.is_string()) Fail(std::string(what) + " holds a non-string");
    out.push_back(t.get<std::string>());
  }
  return out;
}

double FiniteNumber(const nlohmann::json& j, const char* what) {
  if (!j.is_number()) Fail(std::string(what) + " is not a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) Fail(std::string(what) + " is not finite");
  return v;
}

}  // namespace

nlohmann::json TokenizeRequest(std::span<const std::string> texts) {
  return {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
}

nlohmann::json PredictRequest(std::span<const TokenSeq> inputs) {
  return {{"inputs", std::vector<TokenSeq>(inputs.begin(), inputs.end())}};
}

nlohmann::json AttributeRequest(std::span<const TokenSeq> inputs) {
  return PredictRequest(inputs);
}

std::vector<TokenSeq> ParseTokenizeResponse(const nlohmann::json& body,
                                            size_t expected_count) {
  const auto& arr = ArrayField(body, "tokens", expected_count);
  std::vector<TokenSeq> out;
  out.reserve(arr.size());
  for (const auto& seq : arr) out.push_back(ParseTokenList(seq, "tokens[i]"));
  return out;
}

std::vector<Prediction> ParsePredictResponse(const nlohmann::json& body,
                                             size_t expected_count,
                                             int label_count) {
  const auto& arr = ArrayField(body, "predictions", expected_count);
  std::vector<Prediction> out;
  out.reserve(arr.size());
  for (const auto& p : arr) {
    if (!p.is_object() || !p.contains("label") ||
        !p["label"].is_number_integer() || !p.contains("probs") ||
        !p["probs"].is_array()) {
      Fail("prediction entry lacks integer 'label' or array 'probs'");
    }
    Prediction pred;
    pred.label = p["label"].get<LabelId>();
    if (pred.label < 0 || pred.label >= label_count) {
      Fail("predicted label " + std::to_string(pred.label) + " out of range");
    }
    if (p["probs"].size() != static_cast<size_t>(label_count)) {
      Fail("'probs' length differs from label_count");
    }
    double total = 0.0;
    for (const auto& v : p["probs"]) {
      const double prob = FiniteNumber(v, "probability");
      if (prob < 0.0 || prob > 1.0) Fail("probability outside [0,1]");
      total += prob;
      pred.probabilities.push_back(prob);
    }
    if (std::abs(total - 1.0) > 1e-6) Fail("probabilities do not sum to 1");
    const double top = pred.probabilities[ArgmaxLowest(pred.probabilities)];
    if (pred.probabilities[pred.label] < top - 1e-9) {
      Fail("label is not the argmax of its probabilities");
    }
    out.push_back(std::move(pred));
  }
  return out;
}

std::vector<AttributionVector> ParseAttributeResponse(
    const nlohmann::json& body, std::span<const TokenSeq> inputs) {
  const auto& arr = ArrayField(body, "attributions", inputs.size());
  std::vector<AttributionVector> out;
  out.reserve(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_array() || arr[i].size() != inputs[i].size()) {
      Fail("attribution " + std::to_string(i) +
           " length differs from its input token count");
    }
    AttributionVector scores;
    scores.reserve(arr[i].size());
    for (const auto& v : arr[i]) scores.push_back(FiniteNumber(v, "score"));
    out.push_back(std::move(scores));
  }
  return out;
}

ModelMeta ParseMetaResponse(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("label_count") ||
      !body["label_count"].is_number_integer() ||
      !body.contains("mask_token") || !body["mask_token"].is_string() ||
      !body.contains("model_name") || !body["model_name"].is_string()) {
    Fail("meta response lacks label_count/mask_token/model_name");
  }
  ModelMeta meta{body["label_count"].get<int>(),
                 body["mask_token"].get<std::string>(),
                 body["model_name"].get<std::string>()};
  if (meta.label_count < 1) Fail("label_count must be positive");
  if (meta.mask_token.empty()) Fail("mask_token must be non-empty");
  return meta;
}

nlohmann::json TokenizeResponse(std::span<const TokenSeq> tokens) {
  return {{"tokens", std::vector<TokenSeq>(tokens.begin(), tokens.end())}};
}

nlohmann::json PredictResponse(std::span<const Prediction> predictions) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : predictions) {
    arr.push_back({{"label", p.label}, {"probs", p.probabilities}});
  }
  return {{"predictions", arr}};
}

nlohmann::json AttributeResponse(
    std::span<const AttributionVector> attributions) {
  return {{"attributions", std::vector<AttributionVector>(
                               attributions.begin(), attributions.end())}};
}

nlohmann::json MetaResponse(const ModelMeta& meta) {
  return {{"label_count", meta.label_count},
          {"mask_token", meta.mask_token},
          {"model_name", meta.model_name}};
}

std::vector<std::string> ParseTokenizeRequest(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("texts") ||
      !body["texts"].is_array()) {
    Fail("request lacks array field 'texts'");
  }
  std::vector<std::string> out;
  for (const auto& t : body["texts"]) {
    if (!t.is_string()) Fail("'texts' holds a non-string");
    out.push_back(t.get<std::string>());
  }
  return out;
}

std::vector<TokenSeq> ParseInputsRequest(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("inputs") ||
      !body["inputs"].is_array()) {
    Fail("request lacks array field 'inputs'");
  }
  std::vector<TokenSeq> out;
  for (const auto& seq : body["inputs"]) {
    out.push_back(ParseTokenList(seq, "inputs[i]"));
  }
  return out;
}

}  // namespace shortcut::wire
