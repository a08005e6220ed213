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

#ifndef SHORTCUT_REMOTE_ADAPTER_H_
#define SHORTCUT_REMOTE_ADAPTER_H_

#include <chrono>
#include <memory>
#include <string>

#include "shortcut/adapter.h"
#include "shortcut/wire_protocol.h"

namespace shortcut {

struct RemoteAdapterOptions {
  size_t pool_size = 4;
  size_t batch_size = 32;
  int max_attempts = 3;
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds retry_backoff{200};
};

// Client for a model server speaking the JSON protocol in wire_protocol.h.
// Requests are spread over a bounded pool of keep-alive connections; callers
// beyond the pool size block until a connection is released. Transport
// failures are retried up to max_attempts and then surface as kTransport.
class RemoteAdapter final : public ModelAdapter {
 public:
  // Fetches /meta eagerly, so an unreachable server fails here.
  explicit RemoteAdapter(std::string base_url,
                         RemoteAdapterOptions options = {});
  ~RemoteAdapter() override;

  RemoteAdapter(const RemoteAdapter&) = delete;
  RemoteAdapter& operator=(const RemoteAdapter&) = delete;

  int label_count() const override { return meta_.label_count; }
  const Token& mask_token() const override { return meta_.mask_token; }
  size_t batch_size() const override { return options_.batch_size; }
  std::string identity() const override;

  std::vector<TokenSeq> Tokenize(
      std::span<const std::string> texts) const override;
  std::vector<Prediction> PredictBatch(
      std::span<const TokenSeq> inputs) const override;
  std::vector<AttributionVector> AttributeBatch(
      std::span<const TokenSeq> inputs) const override;

  // Number of HTTP requests issued so far, retries included.
  size_t request_count() const;

 private:
  class Pool;

  nlohmann::json Post(const char* path, const nlohmann::json& body) const;
  nlohmann::json Get(const char* path) const;

  std::string base_url_;
  RemoteAdapterOptions options_;
  std::unique_ptr<Pool> pool_;
  wire::ModelMeta meta_;
};

}  // namespace shortcut

#endif  // SHORTCUT_REMOTE_ADAPTER_H_
