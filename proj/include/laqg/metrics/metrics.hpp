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
#include <string>
#include <vector>

#include "json.hpp"
#include "laqg/data/text.hpp"

namespace laqg::metrics {

using data::Tokens;

/// Corpus-level n-gram statistics for one order.
struct NgramCounts {
  std::size_t clipped = 0;  // matches clipped by reference counts
  std::size_t total = 0;    // hypothesis n-grams
};

struct BleuOptions {
  std::size_t max_n = 4;
  /// 0 disables smoothing; otherwise zero match counts become `epsilon`.
  double epsilon = 0.0;
};

struct BleuResult {
  std::vector<double> scores;  // BLEU-1..max_n as percentages
  std::vector<NgramCounts> counts;
  double brevity_penalty = 0.0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;
};

/// Corpus BLEU: clipped precisions summed over the corpus, geometric mean
/// over orders 1..n, times the brevity penalty.
BleuResult bleu(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs,
                const BleuOptions& options = {});

/// Length of the longest common subsequence.
std::size_t lcs_length(const Tokens& a, const Tokens& b);

/// ROUGE-L F-measure of one pair in [0, 1]: (1+b^2) P R / (R + b^2 P).
double rouge_l_pair(const Tokens& hyp, const Tokens& ref, double beta = 1.0);
/// Mean pairwise ROUGE-L as a percentage.
double rouge_l(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs, double beta = 1.0);

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

struct MeteorAlignment {
  std::size_t matches = 0;
  std::size_t exact = 0;
  std::size_t stem = 0;
  std::size_t chunks = 0;
};

/// Exact-then-stem unigram alignment. Within a stage each hypothesis token
/// extends the current chunk when it can; otherwise it takes the unmatched
/// reference position starting the longest run of equal tokens (leftmost on
/// ties), which keeps the chunk count low.
MeteorAlignment meteor_align(const Tokens& hyp, const Tokens& ref);
/// METEOR without synonym/paraphrase stages, in [0, 1].
double meteor_pair(const Tokens& hyp, const Tokens& ref, const MeteorParams& params = {});
/// Mean pairwise score as a percentage.
double meteor_lite(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs,
                   const MeteorParams& params = {});

inline constexpr const char* kMeteorNote =
    "METEOR-lite: exact and Porter-stem matching only (no synonym or paraphrase stage); "
    "scores are not comparable with full METEOR.";

struct MetricOptions {
  BleuOptions bleu;
  double rouge_beta = 1.0;
  MeteorParams meteor;
};

/// One row of the automatic-metrics table.
struct MetricReport {
  double bleu1 = 0.0, bleu2 = 0.0, bleu3 = 0.0, bleu4 = 0.0;
  double meteor = 0.0;
  double rouge_l = 0.0;
  std::size_t count = 0;

  static const std::array<const char*, 6>& columns();
  std::array<double, 6> values() const;
};

MetricReport evaluate_corpus(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs,
                             const MetricOptions& options = {});

nlohmann::ordered_json to_json(const MetricReport& report);
MetricReport report_from_json(const nlohmann::json& j);
/// Aligned text table: a header row of the six columns plus one row per
/// (label, report).
std::string format_table(const std::vector<std::pair<std::string, MetricReport>>& rows,
                         const std::string& label_header = "run");

}  // namespace laqg::metrics
