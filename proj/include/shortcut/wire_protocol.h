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

// JSON bodies exchanged with a model server. All endpoints are stateless
// POSTs except GET /meta:
//
//   POST /tokenize  {"texts":[string,...]}   -> {"tokens":[[string,...],...]}
//   POST /predict   {"inputs":[[string,...],...]}
//                   -> {"predictions":[{"label":int,"probs":[float,...]},...]}
//   POST /attribute {"inputs":[[string,...],...]}
//                   -> {"attributions":[[float,...],...]}
//   GET  /meta      -> {"label_count":int,"mask_token":string,
//                       "model_name":string}
//
// The Parse* functions validate a response against its request and throw
// AuditError(kProtocol) on any schema or length mismatch.

#ifndef SHORTCUT_WIRE_PROTOCOL_H_
#define SHORTCUT_WIRE_PROTOCOL_H_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "shortcut/adapter.h"

namespace shortcut::wire {

inline constexpr char kTokenizePath[] = "/tokenize";
inline constexpr char kPredictPath[] = "/predict";
inline constexpr char kAttributePath[] = "/attribute";
inline constexpr char kMetaPath[] = "/meta";

struct ModelMeta {
  int label_count = 0;
  Token mask_token;
  std::string model_name;
};

nlohmann::json TokenizeRequest(std::span<const std::string> texts);
nlohmann::json PredictRequest(std::span<const TokenSeq> inputs);
nlohmann::json AttributeRequest(std::span<const TokenSeq> inputs);

std::vector<TokenSeq> ParseTokenizeResponse(const nlohmann::json& body,
                                            size_t expected_count);
std::vector<Prediction> ParsePredictResponse(const nlohmann::json& body,
                                             size_t expected_count,
                                             int label_count);
std::vector<AttributionVector> ParseAttributeResponse(
    const nlohmann::json& body, std::span<const TokenSeq> inputs);
ModelMeta ParseMetaResponse(const nlohmann::json& body);

// Server-side helpers: encode responses in the same schema.
nlohmann::json TokenizeResponse(std::span<const TokenSeq> tokens);
nlohmann::json PredictResponse(std::span<const Prediction> predictions);
nlohmann::json AttributeResponse(
    std::span<const AttributionVector> attributions);
nlohmann::json MetaResponse(const ModelMeta& meta);

// Request-side parsing for servers and replay mocks. Throws kProtocol.
std::vector<std::string> ParseTokenizeRequest(const nlohmann::json& body);
std::vector<TokenSeq> ParseInputsRequest(const nlohmann::json& body);

}  // namespace shortcut::wire

#endif  // SHORTCUT_WIRE_PROTOCOL_H_
