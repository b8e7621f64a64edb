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

#include "laqg/models/model.hpp"

#include <algorithm>

#include "families.hpp"
#include "laqg/data/text.hpp"
#include "laqg/data/vocab.hpp"
#include "laqg/error.hpp"

namespace laqg::models {

using ad::Graph;
using ad::Var;
using data::Vocab;

SourceInput source_from_ids(std::span<const int> ext_ids, std::size_t base_size,
                            std::optional<std::vector<int>> secondary) {
  SourceInput src;
  src.ext = extend_ids(ext_ids, base_size);
  for (int id : ext_ids)
    src.ids.push_back(static_cast<std::size_t>(id) >= base_size ? Vocab::kUnk : id);
  src.secondary = std::move(secondary);
  return src;
}

namespace {

data::Tokens truncated(const data::Tokens& tokens, std::size_t limit) {
  return {tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(std::min(limit, tokens.size()))};
}

}  // namespace

SourceInput prepare_source(const data::Example& ex, const data::Vocab& vocab,
                           const ModelConfig& config) {
  const data::Tokens answer = truncated(ex.answer, config.max_src_len);
  SourceInput src;
  src.ids = vocab.encode(answer);
  src.ext = extend_source(answer, vocab);
  if (config.family == Family::kMultiSourceTransformer) {
    const data::Tokens second = ex.secondary && !ex.secondary->empty()
                                    ? truncated(*ex.secondary, config.max_src_len)
                                    : data::first_sentence(answer);
    src.secondary = vocab.encode(second);
  }
  return src;
}

PreparedExample prepare_example(const data::Example& ex, const data::Vocab& vocab,
                                const ModelConfig& config) {
  if (config.max_tgt_len < 1) throw ConfigError("max_tgt_len must be at least 1");
  PreparedExample out;
  out.source = prepare_source(ex, vocab, config);
  for (const auto& tok : truncated(ex.question, config.max_tgt_len - 1)) {
    out.target.push_back(uses_copy(config.family) ? out.source.ext.target_id(tok, vocab)
                                                  : vocab.id(tok));
  }
  out.target.push_back(Vocab::kEos);
  return out;
}

std::size_t Model::output_size(const SourceInput& src) const {
  return uses_copy(config_.family) ? src.ext.ext_size() : config_.vocab_size;
}

int Model::input_id(int token) const {
  if (token < 0) throw DataError("negative token id " + std::to_string(token));
  return static_cast<std::size_t>(token) >= config_.vocab_size ? Vocab::kUnk : token;
}

Encoded Model::encode(Graph& g, const SourceInput& src) const {
  const bool multi = config_.family == Family::kMultiSourceTransformer;
  if (src.secondary && !multi) {
    throw ContractError("secondary input given to single-source family " +
                        std::string(family_name(config_.family)));
  }
  if (multi && (!src.secondary || src.secondary->empty())) {
    throw ContractError("multi-source family needs a non-empty secondary input");
  }
  if (src.ids.empty()) throw ContractError("empty source sequence");
  if (src.ids.size() != src.ext.ext_ids.size()) {
    throw ContractError("source ids and extended ids disagree in length");
  }
  Encoded enc;
  enc.source = src;
  if (enc.source.ids.size() > config_.max_src_len) {
    std::vector<int> ext(src.ext.ext_ids.begin(),
                         src.ext.ext_ids.begin() + static_cast<std::ptrdiff_t>(config_.max_src_len));
    std::vector<std::string> oov = src.ext.oov_tokens;
    enc.source.ids.resize(config_.max_src_len);
    enc.source.ext = extend_ids(ext, src.ext.base_size);
    // Keep the OOV slot numbering (and its text) of the full source.
    enc.source.ext.oov_tokens = std::move(oov);
  }
  if (enc.source.secondary && enc.source.secondary->size() > config_.max_src_len) {
    enc.source.secondary->resize(config_.max_src_len);
  }
  auto check = [&](const std::vector<int>& ids) {
    for (int id : ids)
      if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size)
        throw DataError("source id " + std::to_string(id) + " outside vocabulary of " +
                        std::to_string(config_.vocab_size));
  };
  check(enc.source.ids);
  if (enc.source.secondary) check(*enc.source.secondary);
  encode_into(g, enc);
  return enc;
}

DecoderState Model::start(Graph& g, const Encoded& enc) const { return initial_state(g, enc); }

Var Model::normalize(const Logits& logits, const SourceInput& src) const {
  if (!uses_copy(config_.family)) return ad::log_softmax_rows(logits.gen);
  if (!logits.attn) throw ContractError("copy family produced no attention scores");
  return copy_log_probs(logits.gen, *logits.attn, src.ext, aggregation_for(config_.family));
}

StepOutput Model::step(Graph& g, const Encoded& enc, DecoderState& state, int prev_token) const {
  Logits l = decode_step(g, enc, state, input_id(prev_token));
  return {l.gen, l.attn, normalize(l, enc.source)};
}

Model::Logits Model::decode_all(Graph& g, const Encoded& enc, std::span<const int> inputs) const {
  DecoderState state = initial_state(g, enc);
  std::vector<Var> gen, attn;
  for (int id : inputs) {
    Logits l = decode_step(g, enc, state, id);
    gen.push_back(l.gen);
    if (l.attn) attn.push_back(*l.attn);
  }
  Logits out{ad::concat_rows(gen), std::nullopt};
  if (!attn.empty()) out.attn = ad::concat_rows(attn);
  return out;
}

Var Model::teacher_forced(Graph& g, const Encoded& enc, std::span<const int> target) const {
  if (target.empty()) throw ContractError("empty target sequence");
  std::vector<int> inputs{Vocab::kBos};
  for (std::size_t i = 0; i + 1 < target.size(); ++i) inputs.push_back(input_id(target[i]));
  return normalize(decode_all(g, enc, inputs), enc.source);
}

Var Model::loss(Graph& g, const SourceInput& src, std::span<const int> target) const {
  Encoded enc = encode(g, src);
  return ad::nll_sum(teacher_forced(g, enc, target), target, Vocab::kPad);
}

std::unique_ptr<Model> build_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  if (is_lstm(config.family)) return std::make_unique<detail::LstmModel>(config, seed);
  return std::make_unique<detail::TransformerModel>(config, seed);
}

Var transformer_copy_scores(const Model& model, const StepOutput& step) {
  if (model.config().family != Family::kTransformerCopy) {
    throw ContractError("copy scores requested from family " +
                        std::string(family_name(model.config().family)));
  }
  if (!step.attn_logits) throw ContractError("step output carries no attention scores");
  return *step.attn_logits;
}

CopyAggregation aggregation_for(Family f) {
  return f == Family::kLstmMaxout ? CopyAggregation::kMax : CopyAggregation::kSum;
}

}  // namespace laqg::models
