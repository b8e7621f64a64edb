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

#include <span>
#include <string>
#include <vector>

#include "laqg/autodiff/ops.hpp"
#include "laqg/data/text.hpp"

namespace laqg::data {
class Vocab;
}

namespace laqg::models {

/// Source positions mapped into the extended vocabulary: base ids for
/// in-vocabulary tokens, base_size + k for the k-th distinct source OOV.
struct ExtendedSource {
  std::size_t base_size = 0;
  std::vector<int> ext_ids;             // per source position
  std::vector<std::string> oov_tokens;  // ext id base_size + k -> oov_tokens[k]
  std::vector<int> unique_ids;          // distinct ext ids, first-occurrence order
  std::vector<int> position_group;      // per position: index into unique_ids

  std::size_t ext_size() const { return base_size + oov_tokens.size(); }
  /// Ext id of a target token: base id, the source OOV slot, or UNK.
  int target_id(const std::string& token, const data::Vocab& vocab) const;
  std::string render(int ext_id, const data::Vocab& vocab) const;
};

ExtendedSource extend_source(std::span<const std::string> tokens, const data::Vocab& vocab);

/// Builds the grouping from ext ids directly. Ids >= base_size are OOV
/// slots and must cover base_size..max densely.
ExtendedSource extend_ids(std::span<const int> ext_ids, std::size_t base_size);

enum class CopyAggregation { kSum, kMax };

/// Per-word copy scores: attn_logits [rows x positions] reduced over the
/// positions holding each distinct word -> [rows x unique words].
ad::Var copy_scores(ad::Var attn_logits, const ExtendedSource& src, CopyAggregation agg);

/// Joint softmax over [gen_logits | per-word copy scores]; probability mass
/// of a word present in both channels is added. Returns log-probabilities
/// over the extended vocabulary, [rows x ext_size].
ad::Var copy_log_probs(ad::Var gen_logits, ad::Var attn_logits, const ExtendedSource& src,
                       CopyAggregation agg);

/// Single-step helpers on plain values; return a probability distribution
/// over the extended vocabulary implied by `src_ext_ids`.
std::vector<double> copy_aggregate_sum(std::span<const double> gen_logits,
                                       std::span<const double> attn_logits,
                                       std::span<const int> src_ext_ids);
std::vector<double> copy_aggregate_max(std::span<const double> gen_logits,
                                       std::span<const double> attn_logits,
                                       std::span<const int> src_ext_ids);

}  // namespace laqg::models
