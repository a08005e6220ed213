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

// Fixtures shared by the test binaries.

#ifndef SHORTCUT_TESTS_TEST_SUPPORT_H_
#define SHORTCUT_TESTS_TEST_SUPPORT_H_

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "oracles.h"
#include "shortcut/adapter.h"
#include "shortcut/corpus.h"
#include "shortcut/errors.h"
#include "shortcut/identify.h"
#include "shortcut/random.h"
#include "shortcut/wire_protocol.h"

namespace shortcut::testing {

// Labels {NEG=0, POS=1}; "don't" -> (2,0), "like" -> (0,3), zero bias.
inline ToyLexiconModel NegPosModel() {
  ToyLexiconModel model(2, {0.0, 0.0});
  model.SetWeight("don't", {2.0, 0.0});
  model.SetWeight("like", {0.0, 3.0});
  return model;
}

inline oracle::LinearModel ToOracle(const ToyLexiconModel& model) {
  const nlohmann::json j = model.ToJson();
  oracle::LinearModel out;
  out.bias = j["bias"].get<std::vector<double>>();
  out.mask = j["mask_token"].get<std::string>();
  for (const auto& [token, w] : j["weights"].items()) {
    out.weights[token] = w.get<std::vector<double>>();
  }
  return out;
}

inline std::string Join(const TokenSeq& tokens) {
  std::string s;
  for (const auto& t : tokens) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

// Tokenized corpus with ids "<prefix><i>".
inline Corpus MakeCorpus(const std::vector<std::pair<TokenSeq, LabelId>>& rows,
                         std::vector<std::string> label_names, Split split,
                         const std::string& prefix = "e") {
  Corpus c;
  c.label_names = std::move(label_names);
  c.split = split;
  c.source = "test";
  c.tokenizer = "test-tokenizer";
  for (size_t i = 0; i < rows.size(); ++i) {
    c.examples.push_back({prefix + std::to_string(i), Join(rows[i].first),
                          rows[i].first, rows[i].second});
  }
  return c;
}

inline std::vector<std::string> Vocabulary(size_t n, const std::string& stem = "t") {
  std::vector<std::string> v;
  for (size_t i = 0; i < n; ++i) v.push_back(stem + std::to_string(i));
  return v;
}

inline TokenSeq RandomTokens(Rng& rng, const std::vector<std::string>& vocab,
                             size_t min_len, size_t max_len) {
  TokenSeq out(rng.Between(min_len, max_len));
  for (auto& t : out) t = vocab[rng.Below(vocab.size())];
  return out;
}

// Integer-valued weights so that ties and exact sums occur often.
inline ToyLexiconModel RandomModel(Rng& rng, const std::vector<std::string>& vocab,
                                   int label_count) {
  std::vector<double> bias(label_count);
  for (auto& b : bias) b = static_cast<double>(rng.Below(3));
  ToyLexiconModel model(label_count, bias);
  for (const auto& token : vocab) {
    if (rng.Bernoulli(0.2)) continue;  // unknown token
    std::vector<double> w(label_count);
    for (auto& x : w) x = static_cast<double>(rng.Below(7)) - 2.0;
    model.SetWeight(token, w);
  }
  return model;
}

// Delegates to a model, counting calls and optionally failing: PredictBatch
// and AttributeBatch throw kTransport when an input holds `poison`.
class InstrumentedAdapter final : public ModelAdapter {
 public:
  InstrumentedAdapter(const ModelAdapter& inner, size_t batch_size,
                      Token poison = "")
      : inner_(inner), batch_size_(batch_size), poison_(std::move(poison)) {}

  int label_count() const override { return inner_.label_count(); }
  const Token& mask_token() const override { return inner_.mask_token(); }
  size_t batch_size() const override { return batch_size_; }
  std::string identity() const override { return inner_.identity(); }
  std::vector<TokenSeq> Tokenize(
      std::span<const std::string> texts) const override {
    ++tokenize_calls;
    max_batch = std::max(max_batch.load(), texts.size());
    return inner_.Tokenize(texts);
  }
  std::vector<Prediction> PredictBatch(
      std::span<const TokenSeq> inputs) const override {
    ++predict_calls;
    max_batch = std::max(max_batch.load(), inputs.size());
    Check(inputs);
    return inner_.PredictBatch(inputs);
  }
  std::vector<AttributionVector> AttributeBatch(
      std::span<const TokenSeq> inputs) const override {
    ++attribute_calls;
    Check(inputs);
    return inner_.AttributeBatch(inputs);
  }

  mutable std::atomic<size_t> tokenize_calls{0};
  mutable std::atomic<size_t> predict_calls{0};
  mutable std::atomic<size_t> attribute_calls{0};
  mutable std::atomic<size_t> max_batch{0};

 private:
  void Check(std::span<const TokenSeq> inputs) const {
    if (poison_.empty()) return;
    for (const auto& x : inputs) {
      for (const auto& t : x) {
        if (t == poison_) throw AuditError(ErrorKind::kTransport, "injected");
      }
    }
  }
  const ModelAdapter& inner_;
  size_t batch_size_;
  Token poison_;
};

// Stats rows with values on a coarse grid so that threshold ties occur,
// and with some undefined statistics.
inline std::vector<StatsRow> RandomStatsRows(Rng& rng, size_t n, int label_count) {
  std::vector<StatsRow> rows;
  for (size_t i = 0; i < n; ++i) {
    StatsRow row;
    PatternStats& s = row.stats;
    s.pattern = {{"w" + std::to_string(i)},
                 static_cast<LabelId>(rng.Below(label_count))};
    s.support_ood = rng.Below(5) == 0 ? 0 : rng.Between(1, 300);
    s.support_iid = rng.Below(300);
    if (s.support_ood > 0) {
      s.g = static_cast<double>(rng.Below(21)) * 5.0;
      s.delta = static_cast<double>(rng.Below(41)) * 2.5 - 60.0;
    }
    if (rng.Below(6) != 0) {
      s.iid_acc = static_cast<double>(rng.Below(21)) * 5.0;
      s.n_pred_l_iid = 1 + rng.Below(50);
    }
    row.provenance.extraction_count = 1 + rng.Below(9);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline oracle::Row ToOracleRow(const StatsRow& row) {
  return {row.stats.g, row.stats.iid_acc, row.stats.delta, row.stats.support_ood};
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("shortcut_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Serves a ModelAdapter over the wire protocol on a loopback port. `fault`
// may return a non-zero HTTP status to inject a failure for a request.
// A loopback port with nothing listening on it, so connecting is refused.
inline int ClosedPort() {
  const int fd = socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  socklen_t len = sizeof addr;
  bind(fd, reinterpret_cast<sockaddr*>(&addr), len);
  getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  close(fd);
  return ntohs(addr.sin_port);
}

class ModelServer {
 public:
  struct Exchange {
    std::string method;
    std::string path;
    nlohmann::json request;
    nlohmann::json response;
  };

  explicit ModelServer(const ModelAdapter& model, std::string name = "stand-in")
      : model_(model), name_(std::move(name)) {
    server_.Get(wire::kMetaPath, [this](const httplib::Request&,
                                         httplib::Response& res) {
      Handle("GET", wire::kMetaPath, nullptr, res, [&](const nlohmann::json&) {
        return wire::MetaResponse(
            {model_.label_count(), model_.mask_token(), name_});
      });
    });
    server_.Post(wire::kTokenizePath, [this](const httplib::Request& req,
                                             httplib::Response& res) {
      Handle("POST", wire::kTokenizePath, &req, res,
             [&](const nlohmann::json& body) {
               const auto texts = wire::ParseTokenizeRequest(body);
               return wire::TokenizeResponse(model_.Tokenize(texts));
             });
    });
    server_.Post(wire::kPredictPath, [this](const httplib::Request& req,
                                            httplib::Response& res) {
      Handle("POST", wire::kPredictPath, &req, res,
             [&](const nlohmann::json& body) {
               const auto inputs = wire::ParseInputsRequest(body);
               return wire::PredictResponse(model_.PredictBatch(inputs));
             });
    });
    server_.Post(wire::kAttributePath, [this](const httplib::Request& req,
                                              httplib::Response& res) {
      Handle("POST", wire::kAttributePath, &req, res,
             [&](const nlohmann::json& body) {
               const auto inputs = wire::ParseInputsRequest(body);
               return wire::AttributeResponse(model_.AttributeBatch(inputs));
             });
    });
    server_.set_tcp_nodelay(true);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ModelServer() {
    server_.stop();
    thread_.join();
  }
  ModelServer(const ModelServer&) = delete;
  ModelServer& operator=(const ModelServer&) = delete;

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  void set_fault(std::function<int(const std::string& path)> fault) {
    std::lock_guard lock(mu_);
    fault_ = std::move(fault);
  }
  void set_record(bool on) {
    std::lock_guard lock(mu_);
    record_ = on;
  }
  std::vector<Exchange> exchanges() const {
    std::lock_guard lock(mu_);
    return exchanges_;
  }
  size_t count(const std::string& path) const {
    std::lock_guard lock(mu_);
    auto it = counts_.find(path);
    return it == counts_.end() ? 0 : it->second;
  }

 private:
  template <typename F>
  void Handle(const std::string& method, const std::string& path,
              const httplib::Request* req, httplib::Response& res, F&& body) {
    std::function<int(const std::string&)> fault;
    bool record;
    {
      std::lock_guard lock(mu_);
      ++counts_[path];
      fault = fault_;
      record = record_;
    }
    if (fault) {
      if (int status = fault(path); status != 0) {
        res.status = status;
        res.set_content("injected failure", "text/plain");
        return;
      }
    }
    try {
      const nlohmann::json request =
          req ? nlohmann::json::parse(req->body) : nlohmann::json();
      const nlohmann::json response = body(request);
      res.set_content(response.dump(), "application/json");
      if (record) {
        std::lock_guard lock(mu_);
        exchanges_.push_back({method, path, request, response});
      }
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(e.what(), "text/plain");
    }
  }

  const ModelAdapter& model_;
  std::string name_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mu_;
  std::function<int(const std::string&)> fault_;
  bool record_ = false;
  std::vector<Exchange> exchanges_;
  std::map<std::string, size_t> counts_;
};

}  // namespace shortcut::testing

#endif  // SHORTCUT_TESTS_TEST_SUPPORT_H_
