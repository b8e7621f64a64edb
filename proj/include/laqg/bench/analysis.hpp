// Copyright 2026 The LAQG Bench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "laqg/data/example.hpp"
#include "laqg/metrics/metrics.hpp"

namespace laqg::bench {

/// One scored generation: hypothesis, reference and answer-length facts.
struct ResultRecord {
  std::string id;
  data::Tokens hypothesis;
  data::Tokens reference;
  std::size_t answer_words = 0;
  std::size_t answer_sentences = 0;
};

/// Pairs generations (id -> hypothesis tokens) with their dataset examples.
/// Every generated id must exist in the dataset (DataError listing the
/// unknown ids); dataset examples without a generation are skipped.
std::vector<ResultRecord> join_results(const std::map<std::string, data::Tokens>& generations,
                                       std::span<const data::Example> dataset);

enum class BinKind { kWords, kSentences };

struct Bin {
  std::string label;
  std::vector<std::string> ids;
  metrics::MetricReport report;  // all zeros (count 0) for an empty bin
};

struct BinnedReport {
  BinKind kind = BinKind::kWords;
  std::vector<Bin> bins;
  std::size_t total() const;
};

/// Half-open bins [0,w), [w,2w), ... with the last of `num_bins` open-ended,
/// labelled "0-50", "50-100", "100-" for width 50. Every bin is listed even
/// when empty; per-bin BLEU is corpus-level within the bin.
BinnedReport bin_by_words(std::span<const ResultRecord> results, std::size_t width,
                          std::size_t num_bins = 3, const metrics::MetricOptions& options = {});

/// One bin per sentence count 1..cap-1 plus "cap+" for the rest (counts of
/// zero fall in the first bin).
BinnedReport bin_by_sentences(std::span<const ResultRecord> results, std::size_t cap = 6,
                              const metrics::MetricOptions& options = {});

using MetricDelta = std::array<double, 6>;

struct BinComparison {
  std::string label;
  metrics::MetricReport a, b;
  MetricDelta delta;  // a - b, per metric column
};

struct RunComparison {
  std::string name_a, name_b;
  BinKind kind = BinKind::kWords;
  metrics::MetricReport overall_a, overall_b;
  MetricDelta overall_delta;
  std::vector<BinComparison> bins;
};

/// Side-by-side metrics of two runs over the same example ids, overall and
/// per bin (`param` is the word-bin width or the sentence cap). Differing id
/// sets raise DataError naming the ids missing from each side.
RunComparison compare_runs(std::span<const ResultRecord> a, std::span<const ResultRecord> b,
                           const std::string& name_a, const std::string& name_b, BinKind kind,
                           std::size_t param, const metrics::MetricOptions& options = {});

nlohmann::ordered_json to_json(const BinnedReport& report);
nlohmann::ordered_json to_json(const RunComparison& comparison);

/// Aligned table: bin label, the six metrics and the example count; empty
/// bins show "-".
std::string render_table(const BinnedReport& report);
/// Length-table layout: one row per bin, one column per run, cells holding
/// the metric at `column` (default BLEU-4).
std::string render_comparison(const RunComparison& comparison, std::size_t column = 3);
/// Per-bin signed deltas (a - b) for all six metrics.
std::string render_deltas(const RunComparison& comparison);

std::string to_csv(const BinnedReport& report);
std::string to_csv(const RunComparison& comparison);

std::string bin_header(BinKind kind);

}  // namespace laqg::bench
