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

#ifndef SHORTCUT_CORPUS_H_
#define SHORTCUT_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "shortcut/adapter.h"
#include "shortcut/pattern.h"

namespace shortcut {

enum class Split { kIid, kOod };

const char* SplitName(Split split);

struct LabeledExample {
  std::string id;
  std::string text;
  TokenSeq tokens;  // filled by TokenizeCorpus
  LabelId gold_label = 0;
};

struct Corpus {
  std::vector<LabeledExample> examples;
  std::vector<std::string> label_names;
  Split split = Split::kIid;
  std::string source;
  // identity() of the adapter whose tokenizer produced `tokens`; empty while
  // the corpus is untokenized.
  std::string tokenizer;

  size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
  int label_count() const { return static_cast<int>(label_names.size()); }
  bool tokenized() const { return !tokenizer.empty(); }
};

// JSON-lines reader. Each non-blank line is an object with "text" (string),
// "label" (a string in `label_names` or an integer index) and an optional
// string "id"; missing ids are assigned from the example's ordinal. Errors
// are kLoad and name the 1-based line number.
Corpus ParseCorpus(std::istream& in, const std::vector<std::string>& label_names,
                   Split split, std::string source = "<stream>");
Corpus LoadCorpus(const std::filesystem::path& path,
                  const std::vector<std::string>& label_names, Split split);

// Writes {"id","text","label"} lines with labels as names.
void WriteCorpus(const Corpus& corpus, std::ostream& out);
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);

struct TokenizeResult {
  Corpus corpus;
  size_t dropped = 0;  // examples that produced zero tokens
  size_t adapter_calls = 0;
};

// Returns a tokenized copy; the input is left untouched if the adapter
// throws. Calls Tokenize with at most adapter.batch_size() texts at a time.
TokenizeResult TokenizeCorpus(const Corpus& corpus,
                              const ModelAdapter& adapter);

// min(n, |corpus|) distinct examples drawn uniformly without replacement.
// Deterministic for a given seed on every platform.
std::vector<LabeledExample> SampleExamples(const Corpus& corpus, size_t n,
                                           uint64_t seed);

// Content fingerprint over (id, text, label) of every example.
std::string CorpusHash(const Corpus& corpus);

}  // namespace shortcut

#endif  // SHORTCUT_CORPUS_H_
