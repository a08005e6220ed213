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

#include "shortcut/corpus.h"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "shortcut/errors.h"
#include "shortcut/hash.h"
#include "shortcut/random.h"
#include "spdlog/spdlog.h"

namespace shortcut {
namespace {

[[noreturn]] void LoadFail(const std::string& message, size_t line) {
  throw AuditError(ErrorKind::kLoad,
                   message + " at line " + std::to_string(line));
}

}  // namespace

const char* SplitName(Split split) {
  return split == Split::kIid ? "IID" : "OOD";
}

Corpus ParseCorpus(std::istream& in, const std::vector<std::string>& label_names,
                   Split split, std::string source) {
  if (label_names.empty()) {
    throw AuditError(ErrorKind::kConfig, "label set is empty");
  }
  Corpus corpus;
  corpus.label_names = label_names;
  corpus.split = split;
  corpus.source = std::move(source);

  std::unordered_set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      LoadFail("malformed JSON", line_no);
    }
    if (!j.is_object()) LoadFail("expected a JSON object", line_no);
    if (!j.contains("text") || !j["text"].is_string()) {
      LoadFail("missing string field 'text'", line_no);
    }
    if (!j.contains("label")) LoadFail("missing field 'label'", line_no);

    LabeledExample ex;
    ex.text = j["text"].get<std::string>();
    const auto& label = j["label"];
    if (label.is_string()) {
      const auto name = label.get<std::string>();
      auto it = std::find(label_names.begin(), label_names.end(), name);
      if (it == label_names.end()) {
        LoadFail("unknown label '" + name + "'", line_no);
      }
      ex.gold_label = static_cast<LabelId>(it - label_names.begin());
    } else if (label.is_number_integer()) {
      const auto index = label.get<long long>();
      if (index < 0 || index >= static_cast<long long>(label_names.size())) {
        LoadFail("label index " + std::to_string(index) + " out of range",
                 line_no);
      }
      ex.gold_label = static_cast<LabelId>(index);
    } else {
      LoadFail("label must be a string or an integer", line_no);
    }
    if (j.contains("id")) {
      if (!j["id"].is_string()) LoadFail("'id' must be a string", line_no);
      ex.id = j["id"].get<std::string>();
    } else {
      ex.id = std::to_string(corpus.examples.size());
    }
    if (!ids.insert(ex.id).second) {
      LoadFail("duplicate id '" + ex.id + "'", line_no);
    }
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

Corpus LoadCorpus(const std::filesystem::path& path,
                  const std::vector<std::string>& label_names, Split split) {
  std::ifstream in(path);
  if (!in) {
    throw AuditError(ErrorKind::kLoad, "cannot open corpus " + path.string());
  }
  return ParseCorpus(in, label_names, split, path.string());
}

void WriteCorpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& ex : corpus.examples) {
    nlohmann::json j = {{"id", ex.id},
                        {"text", ex.text},
                        {"label", corpus.label_names.at(ex.gold_label)}};
    out << j.dump() << "\n";
  }
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AuditError(ErrorKind::kConfig, "cannot write " + path.string());
  WriteCorpus(corpus, out);
}

TokenizeResult TokenizeCorpus(const Corpus& corpus,
                              const ModelAdapter& adapter) {
  TokenizeResult result;
  result.corpus.label_names = corpus.label_names;
  result.corpus.split = corpus.split;
  result.corpus.source = corpus.source;
  result.corpus.examples.reserve(corpus.size());

  const size_t batch = std::max<size_t>(adapter.batch_size(), 1);
  std::vector<std::string> texts;
  for (size_t begin = 0; begin < corpus.size(); begin += batch) {
    const size_t end = std::min(begin + batch, corpus.size());
    texts.clear();
    for (size_t i = begin; i < end; ++i) {
      texts.push_back(corpus.examples[i].text);
    }
    std::vector<TokenSeq> tokens = adapter.Tokenize(texts);
    ++result.adapter_calls;
    if (tokens.size() != texts.size()) {
      throw AuditError(ErrorKind::kProtocol,
                       "tokenizer returned a wrong number of sequences");
    }
    for (size_t i = begin; i < end; ++i) {
      TokenSeq& seq = tokens[i - begin];
      if (seq.empty()) {
        ++result.dropped;
        continue;
      }
      LabeledExample ex = corpus.examples[i];
      ex.tokens = std::move(seq);
      result.corpus.examples.push_back(std::move(ex));
    }
  }
  if (result.dropped > 0) {
    spdlog::warn("{}: dropped {} example(s) with zero tokens", corpus.source,
                 result.dropped);
  }
  result.corpus.tokenizer = adapter.identity();
  return result;
}

std::vector<LabeledExample> SampleExamples(const Corpus& corpus, size_t n,
                                           uint64_t seed) {
  if (corpus.empty()) {
    throw AuditError(ErrorKind::kContract, "cannot sample an empty corpus");
  }
  std::vector<size_t> order(corpus.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  const size_t take = std::min(n, corpus.size());
  Rng rng(seed);
  // Partial Fisher-Yates: the first `take` slots end up a uniform sample.
  for (size_t i = 0; i < take; ++i) {
    const size_t j = i + rng.Below(order.size() - i);
    std::swap(order[i], order[j]);
  }
  std::vector<LabeledExample> out;
  out.reserve(take);
  for (size_t i = 0; i < take; ++i) out.push_back(corpus.examples[order[i]]);
  return out;
}

std::string CorpusHash(const Corpus& corpus) {
  Fingerprint fp;
  for (const auto& ex : corpus.examples) {
    fp.UpdateField(ex.id);
    fp.UpdateField(ex.text);
    fp.UpdateField(std::to_string(ex.gold_label));
  }
  return fp.Hex();
}

}  // namespace shortcut
