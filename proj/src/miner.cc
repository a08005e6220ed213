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

#include "shortcut/miner.h"

#include <algorithm>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_set>

#include "shortcut/errors.h"
#include "spdlog/spdlog.h"

namespace shortcut {

CandidateSet MergeExtractions(const std::vector<ExtractionResult>& results,
                              bool include_fallback) {
  CandidateSet set;
  for (const auto& r : results) {
    if (r.fallback && !include_fallback) {
      ++set.fallback_excluded;
      continue;
    }
    ++set.reductions;
    Provenance& prov = set.patterns[r.pattern()];
    ++prov.extraction_count;
    if (r.fallback) ++prov.fallback_count;
    prov.source_ids.push_back(r.source_id);
  }
  return set;
}

MineOutput Mine(const Corpus& iid, const ModelAdapter& adapter,
                const MineOptions& options) {
  if (iid.split != Split::kIid) {
    throw AuditError(ErrorKind::kContract, "mining requires an IID corpus");
  }
  if (!iid.tokenized()) {
    throw AuditError(ErrorKind::kContract, "corpus is not tokenized");
  }
  if (options.n_samples == 0) {
    throw AuditError(ErrorKind::kConfig, "n_samples must be positive");
  }

  std::vector<LabeledExample> sample =
      SampleExamples(iid, options.n_samples, options.seed);
  if (!options.skip_ids.empty()) {
    std::unordered_set<std::string> skip(options.skip_ids.begin(),
                                         options.skip_ids.end());
    std::erase_if(sample, [&](const LabeledExample& ex) {
      return skip.contains(ex.id);
    });
  }

  const size_t chunk = std::max<size_t>(adapter.batch_size(), 1);
  const size_t n_chunks = (sample.size() + chunk - 1) / chunk;
  std::vector<std::optional<std::vector<ExtractionResult>>> chunk_results(
      n_chunks);
  std::vector<std::string> chunk_errors(n_chunks);
  std::vector<std::vector<ReductionTrace>> chunk_traces(n_chunks);

  std::mutex mu;
  size_t next_chunk = 0;
  auto worker = [&] {
    for (;;) {
      size_t c;
      {
        std::lock_guard lock(mu);
        if (next_chunk == n_chunks) return;
        c = next_chunk++;
      }
      const size_t begin = c * chunk;
      const size_t end = std::min(begin + chunk, sample.size());
      std::span<const LabeledExample> slice(sample.data() + begin,
                                            end - begin);
      try {
        chunk_results[c] = ReduceBatch(
            slice, adapter, options.collect_traces ? &chunk_traces[c] : nullptr);
      } catch (const AuditError& e) {
        if (e.kind() == ErrorKind::kContract) throw;
        chunk_errors[c] = std::string(ErrorKindName(e.kind())) + ": " +
                          e.what();
      }
    }
  };
  const size_t width = std::clamp<size_t>(options.workers, 1, n_chunks ? n_chunks : 1);
  if (width == 1) {
    worker();
  } else {
    std::vector<std::exception_ptr> failures(width);
    {
      std::vector<std::jthread> pool;
      for (size_t w = 0; w < width; ++w) {
        pool.emplace_back([&, w] {
          try {
            worker();
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
    }
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  // Single collector, in sample order.
  MineOutput out;
  std::vector<std::string> failed;
  std::string summary;
  for (size_t c = 0; c < n_chunks; ++c) {
    if (chunk_results[c]) {
      for (auto& r : *chunk_results[c]) out.extractions.push_back(std::move(r));
      for (auto& t : chunk_traces[c]) out.traces.push_back(std::move(t));
      continue;
    }
    const size_t begin = c * chunk;
    const size_t end = std::min(begin + chunk, sample.size());
    for (size_t i = begin; i < end; ++i) failed.push_back(sample[i].id);
    if (!summary.empty()) summary += "; ";
    summary += chunk_errors[c];
  }
  out.candidates = MergeExtractions(out.extractions, options.include_fallback);
  out.candidates.failed_ids = std::move(failed);
  out.candidates.error_summary = std::move(summary);
  if (!out.candidates.complete()) {
    spdlog::warn("{} of {} reductions failed: {}",
                 out.candidates.failed_ids.size(), sample.size(),
                 out.candidates.error_summary);
  }
  return out;
}

nlohmann::json CandidatesToJson(const CandidateSet& candidates) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [pattern, prov] : candidates.patterns) {
    arr.push_back({{"trigger", pattern.trigger},
                   {"label", pattern.label},
                   {"extraction_count", prov.extraction_count},
                   {"fallback_count", prov.fallback_count},
                   {"source_ids", prov.source_ids}});
  }
  return arr;
}

CandidateSet CandidatesFromJson(const nlohmann::json& j) {
  if (!j.is_array()) {
    throw AuditError(ErrorKind::kLoad, "candidates file must hold an array");
  }
  CandidateSet set;
  for (const auto& row : j) {
    InferencePattern pattern = PatternFromJson(row);
    Provenance prov;
    try {
      prov.extraction_count = row.at("extraction_count").get<size_t>();
      prov.fallback_count = row.value("fallback_count", size_t{0});
      prov.source_ids =
          row.value("source_ids", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
      throw AuditError(ErrorKind::kLoad,
                       std::string("malformed candidate: ") + e.what());
    }
    if (prov.extraction_count == 0) {
      throw AuditError(ErrorKind::kLoad, "candidate with zero extractions");
    }
    set.reductions += prov.extraction_count;
    if (!set.patterns.emplace(std::move(pattern), std::move(prov)).second) {
      throw AuditError(ErrorKind::kLoad, "duplicate candidate pattern");
    }
  }
  return set;
}

}  // namespace shortcut
