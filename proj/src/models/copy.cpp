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

#include "laqg/models/copy.hpp"

#include <cmath>
#include <unordered_map>

#include "laqg/data/vocab.hpp"
#include "laqg/error.hpp"

namespace laqg::models {

using ad::Graph;
using ad::Tensor;
using ad::Var;

int ExtendedSource::target_id(const std::string& token, const data::Vocab& vocab) const {
  const int base = vocab.id(token);
  if (base != data::Vocab::kUnk) return base;
  for (std::size_t k = 0; k < oov_tokens.size(); ++k)
    if (oov_tokens[k] == token) return static_cast<int>(base_size + k);
  return data::Vocab::kUnk;
}

std::string ExtendedSource::render(int ext_id, const data::Vocab& vocab) const {
  if (ext_id >= 0 && static_cast<std::size_t>(ext_id) >= base_size) {
    const std::size_t k = static_cast<std::size_t>(ext_id) - base_size;
    if (k >= oov_tokens.size()) throw DataError("extended id " + std::to_string(ext_id) + " has no source token");
    return oov_tokens[k];
  }
  return vocab.token(ext_id);
}

ExtendedSource extend_source(std::span<const std::string> tokens, const data::Vocab& vocab) {
  ExtendedSource src;
  src.base_size = vocab.size();
  std::unordered_map<std::string, int> oov;
  for (const auto& t : tokens) {
    int id = vocab.id(t);
    if (id == data::Vocab::kUnk && t != "<unk>") {
      auto [it, fresh] = oov.emplace(t, static_cast<int>(src.base_size + src.oov_tokens.size()));
      if (fresh) src.oov_tokens.push_back(t);
      id = it->second;
    }
    src.ext_ids.push_back(id);
  }
  ExtendedSource grouped = extend_ids(src.ext_ids, src.base_size);
  grouped.oov_tokens = std::move(src.oov_tokens);
  return grouped;
}

ExtendedSource extend_ids(std::span<const int> ext_ids, std::size_t base_size) {
  ExtendedSource src;
  src.base_size = base_size;
  src.ext_ids.assign(ext_ids.begin(), ext_ids.end());
  std::unordered_map<int, int> group;
  int max_oov = -1;
  for (int id : ext_ids) {
    if (id < 0) throw DataError("negative source id");
    auto [it, fresh] = group.emplace(id, static_cast<int>(src.unique_ids.size()));
    if (fresh) src.unique_ids.push_back(id);
    src.position_group.push_back(it->second);
    if (static_cast<std::size_t>(id) >= base_size) max_oov = std::max(max_oov, id - static_cast<int>(base_size));
  }
  src.oov_tokens.resize(static_cast<std::size_t>(max_oov + 1));
  std::vector<bool> seen(src.oov_tokens.size(), false);
  for (int id : src.unique_ids)
    if (static_cast<std::size_t>(id) >= base_size) seen[static_cast<std::size_t>(id) - base_size] = true;
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) {
      throw ContractError("extended id " + std::to_string(base_size + k) +
                          " skipped: source OOV slots must be numbered densely");
    }
  }
  for (std::size_t k = 0; k < src.oov_tokens.size(); ++k) src.oov_tokens[k] = "<oov" + std::to_string(k) + ">";
  return src;
}

Var copy_scores(Var attn_logits, const ExtendedSource& src, CopyAggregation agg) {
  if (attn_logits.cols() != src.ext_ids.size()) {
    throw ContractError("copy: " + std::to_string(attn_logits.cols()) +
                        " attention scores for " + std::to_string(src.ext_ids.size()) +
                        " source positions");
  }
  return agg == CopyAggregation::kSum
             ? ad::segment_sum_cols(attn_logits, src.position_group, src.unique_ids.size())
             : ad::segment_max_cols(attn_logits, src.position_group, src.unique_ids.size());
}

Var copy_log_probs(Var gen_logits, Var attn_logits, const ExtendedSource& src, CopyAggregation agg) {
  if (gen_logits.cols() != src.base_size) {
    throw ContractError("copy: generation logits cover " + std::to_string(gen_logits.cols()) +
                        " ids, base vocabulary has " + std::to_string(src.base_size));
  }
  if (gen_logits.rows() != attn_logits.rows()) {
    throw ContractError("copy: generation and attention rows disagree");
  }
  Var scores = copy_scores(attn_logits, src, agg);
  const Var parts[] = {gen_logits, scores};
  Var joint = ad::log_softmax_rows(ad::concat_cols(parts));
  std::vector<int> word_of(src.base_size + src.unique_ids.size());
  for (std::size_t c = 0; c < src.base_size; ++c) word_of[c] = static_cast<int>(c);
  for (std::size_t u = 0; u < src.unique_ids.size(); ++u) word_of[src.base_size + u] = src.unique_ids[u];
  return ad::segment_logsumexp_cols(joint, word_of, src.ext_size());
}

namespace {

std::vector<double> aggregate(std::span<const double> gen_logits, std::span<const double> attn_logits,
                              std::span<const int> src_ext_ids, CopyAggregation agg) {
  if (attn_logits.size() != src_ext_ids.size()) {
    throw ContractError("copy: " + std::to_string(attn_logits.size()) + " attention scores for " +
                        std::to_string(src_ext_ids.size()) + " source ids");
  }
  if (gen_logits.empty() || src_ext_ids.empty()) throw ContractError("copy: empty inputs");
  ExtendedSource src = extend_ids(src_ext_ids, gen_logits.size());
  Graph g;
  Var gen = g.constant(Tensor::row(std::vector<double>(gen_logits.begin(), gen_logits.end())));
  Var attn = g.constant(Tensor::row(std::vector<double>(attn_logits.begin(), attn_logits.end())));
  const Tensor logp = copy_log_probs(gen, attn, src, agg).value();
  std::vector<double> p(logp.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(logp[i]);
  return p;
}

}  // namespace

std::vector<double> copy_aggregate_sum(std::span<const double> gen_logits,
                                       std::span<const double> attn_logits,
                                       std::span<const int> src_ext_ids) {
  return aggregate(gen_logits, attn_logits, src_ext_ids, CopyAggregation::kSum);
}

std::vector<double> copy_aggregate_max(std::span<const double> gen_logits,
                                       std::span<const double> attn_logits,
                                       std::span<const int> src_ext_ids) {
  return aggregate(gen_logits, attn_logits, src_ext_ids, CopyAggregation::kMax);
}

}  // namespace laqg::models
