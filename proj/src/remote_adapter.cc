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

#include "shortcut/remote_adapter.h"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

#include "httplib.h"
#include "shortcut/errors.h"
#include "spdlog/spdlog.h"

namespace shortcut {

class RemoteAdapter::Pool {
 public:
  Pool(const std::string& base_url, const RemoteAdapterOptions& options) {
    for (size_t i = 0; i < std::max<size_t>(options.pool_size, 1); ++i) {
      auto client = std::make_unique<httplib::Client>(base_url);
      if (!client->is_valid()) {
        throw AuditError(ErrorKind::kConfig,
                         "invalid model server URL '" + base_url + "'");
      }
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
          options.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
          options.timeout - secs);
      client->set_connection_timeout(secs.count(), usecs.count());
      client->set_read_timeout(secs.count(), usecs.count());
      client->set_write_timeout(secs.count(), usecs.count());
      client->set_keep_alive(true);
      client->set_tcp_nodelay(true);
      idle_.push_back(client.get());
      clients_.push_back(std::move(client));
    }
  }

  class Lease {
   public:
    explicit Lease(Pool& pool) : pool_(pool) {
      std::unique_lock lock(pool_.mu_);
      pool_.cv_.wait(lock, [&] { return !pool_.idle_.empty(); });
      client_ = pool_.idle_.back();
      pool_.idle_.pop_back();
    }
    ~Lease() {
      {
        std::lock_guard lock(pool_.mu_);
        pool_.idle_.push_back(client_);
      }
      pool_.cv_.notify_one();
    }
    Lease(const Lease&) = delete;
    Lease& operator=(const Lease&) = delete;

    httplib::Client& client() { return *client_; }

   private:
    Pool& pool_;
    httplib::Client* client_ = nullptr;
  };

  std::atomic<size_t> requests{0};

 private:
  std::vector<std::unique_ptr<httplib::Client>> clients_;
  std::vector<httplib::Client*> idle_;
  std::mutex mu_;
  std::condition_variable cv_;
};

namespace {

template <typename Send>
nlohmann::json SendWithRetry(const std::string& what,
                             const RemoteAdapterOptions& options,
                             std::atomic<size_t>& counter, Send send) {
  std::string last_error;
  const int attempts = std::max(options.max_attempts, 1);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    ++counter;
    httplib::Result res = send();
    if (!res) {
      last_error = httplib::to_string(res.error());
    } else if (res->status >= 500 || res->status == 429) {
      last_error = "HTTP " + std::to_string(res->status);
    } else if (res->status != 200) {
      throw AuditError(ErrorKind::kProtocol,
                       what + " rejected with HTTP " +
                           std::to_string(res->status) + ": " + res->body);
    } else {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw AuditError(ErrorKind::kProtocol,
                         what + " returned invalid JSON: " + e.what());
      }
    }
    if (attempt < attempts) {
      spdlog::warn("{} failed ({}), retry {}/{}", what, last_error, attempt,
                   attempts - 1);
      std::this_thread::sleep_for(options.retry_backoff * attempt);
    }
  }
  throw AuditError(ErrorKind::kTransport, what + " failed after " +
                                              std::to_string(attempts) +
                                              " attempts: " + last_error);
}

}  // namespace

RemoteAdapter::RemoteAdapter(std::string base_url,
                             RemoteAdapterOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  if (options_.batch_size == 0) {
    throw AuditError(ErrorKind::kConfig, "batch_size must be positive");
  }
  pool_ = std::make_unique<Pool>(base_url_, options_);
  meta_ = wire::ParseMetaResponse(Get(wire::kMetaPath));
}

RemoteAdapter::~RemoteAdapter() = default;

std::string RemoteAdapter::identity() const {
  return meta_.model_name + "@" + base_url_;
}

size_t RemoteAdapter::request_count() const { return pool_->requests.load(); }

nlohmann::json RemoteAdapter::Post(const char* path,
                                   const nlohmann::json& body) const {
  const std::string payload = body.dump();
  return SendWithRetry(std::string("POST ") + path, options_, pool_->requests,
                       [&] {
                         Pool::Lease lease(*pool_);
                         return lease.client().Post(path, payload,
                                                    "application/json");
                       });
}

nlohmann::json RemoteAdapter::Get(const char* path) const {
  return SendWithRetry(std::string("GET ") + path, options_, pool_->requests,
                       [&] {
                         Pool::Lease lease(*pool_);
                         return lease.client().Get(path);
                       });
}

std::vector<TokenSeq> RemoteAdapter::Tokenize(
    std::span<const std::string> texts) const {
  std::vector<TokenSeq> out;
  out.reserve(texts.size());
  for (size_t i = 0; i < texts.size(); i += options_.batch_size) {
    auto chunk = texts.subspan(i, std::min(options_.batch_size,
                                           texts.size() - i));
    auto part = wire::ParseTokenizeResponse(
        Post(wire::kTokenizePath, wire::TokenizeRequest(chunk)), chunk.size());
    for (auto& seq : part) out.push_back(std::move(seq));
  }
  return out;
}

std::vector<Prediction> RemoteAdapter::PredictBatch(
    std::span<const TokenSeq> inputs) const {
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  for (size_t i = 0; i < inputs.size(); i += options_.batch_size) {
    auto chunk = inputs.subspan(i, std::min(options_.batch_size,
                                            inputs.size() - i));
    auto part = wire::ParsePredictResponse(
        Post(wire::kPredictPath, wire::PredictRequest(chunk)), chunk.size(),
        meta_.label_count);
    for (auto& p : part) out.push_back(std::move(p));
  }
  return out;
}

std::vector<AttributionVector> RemoteAdapter::AttributeBatch(
    std::span<const TokenSeq> inputs) const {
  std::vector<AttributionVector> out;
  out.reserve(inputs.size());
  for (size_t i = 0; i < inputs.size(); i += options_.batch_size) {
    auto chunk = inputs.subspan(i, std::min(options_.batch_size,
                                            inputs.size() - i));
    auto part = wire::ParseAttributeResponse(
        Post(wire::kAttributePath, wire::AttributeRequest(chunk)), chunk);
    for (auto& a : part) out.push_back(std::move(a));
  }
  return out;
}

}  // namespace shortcut
