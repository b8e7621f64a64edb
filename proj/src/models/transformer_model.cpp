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

#include <cmath>
#include <random>

#include "families.hpp"
#include "laqg/error.hpp"

namespace laqg::models::detail {

using ad::Graph;
using ad::Var;

TransformerModel::TransformerModel(const ModelConfig& config, std::uint64_t seed) : Model(config) {
  std::mt19937_64 rng(seed);
  const std::size_t d = config_.d_model;
  const std::size_t max_positions = std::max(config_.max_src_len, config_.max_tgt_len) + 1;
  embed_ = ad::Embedding(params_, "embed", config_.vocab_size, d, rng);
  if (config_.positions == Positions::kLearned) {
    learned_positions_ = ad::Embedding(params_, "positions", max_positions, d, rng);
  } else {
    sinusoid_ = ad::positional_encoding(max_positions, d);
  }
  encoder_ = make_encoder("encoder", rng);
  const bool multi = config_.family == Family::kMultiSourceTransformer;
  if (multi) secondary_encoder_ = make_encoder("secondary_encoder", rng);
  for (std::size_t l = 0; l < config_.dec_layers; ++l) {
    const std::string name = "decoder" + std::to_string(l);
    DecoderLayer layer;
    layer.self = ad::MultiHeadAttention(params_, name + ".self", d, config_.heads, rng);
    layer.norm1 = ad::LayerNorm(params_, name + ".norm1", d);
    if (multi) {
      layer.multi = MultiSourceAttention(params_, name + ".cross", d, config_.heads, config_.combine, rng);
    } else {
      layer.cross = ad::MultiHeadAttention(params_, name + ".cross", d, config_.heads, rng);
    }
    layer.norm2 = ad::LayerNorm(params_, name + ".norm2", d);
    layer.ffn = ad::FeedForward(params_, name + ".ffn", d, config_.d_ffn, rng);
    layer.norm3 = ad::LayerNorm(params_, name + ".norm3", d);
    decoder_.push_back(std::move(layer));
  }
  if (!config_.tie_embeddings) output_ = ad::Linear(params_, "output", d, config_.vocab_size, rng);
}

std::vector<TransformerModel::EncoderLayer> TransformerModel::make_encoder(const std::string& name,
                                                                           std::mt19937_64& rng) {
  const std::size_t d = config_.d_model;
  std::vector<EncoderLayer> layers;
  for (std::size_t l = 0; l < config_.enc_layers; ++l) {
    const std::string n = name + std::to_string(l);
    layers.push_back({ad::MultiHeadAttention(params_, n + ".self", d, config_.heads, rng),
                      ad::LayerNorm(params_, n + ".norm1", d),
                      ad::FeedForward(params_, n + ".ffn", d, config_.d_ffn, rng),
                      ad::LayerNorm(params_, n + ".norm2", d)});
  }
  return layers;
}

Var TransformerModel::embed(Graph& g, std::span<const int> ids) const {
  const std::size_t n = ids.size();
  Var x = ad::scale(embed_(g, ids), std::sqrt(static_cast<double>(config_.d_model)));
  Var pos;
  if (config_.positions == Positions::kLearned) {
    if (n > learned_positions_.vocab_size()) throw ContractError("sequence longer than position table");
    std::vector<int> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
    pos = learned_positions_(g, idx);
  } else {
    if (n > sinusoid_.rows()) throw ContractError("sequence longer than position table");
    ad::Tensor rows = ad::Tensor::matrix(n, config_.d_model);
    std::copy_n(sinusoid_.data().begin(), n * config_.d_model, rows.data().begin());
    pos = g.constant(std::move(rows));
  }
  return ad::dropout(ad::add(x, pos), config_.dropout);
}

Var TransformerModel::run_encoder(Graph& g, const std::vector<EncoderLayer>& layers,
                                  std::span<const int> ids) const {
  const double p = config_.dropout;
  Var x = embed(g, ids);
  for (const auto& layer : layers) {
    x = layer.norm1(ad::add(x, ad::dropout(layer.self(x, x, nullptr, p).output, p)));
    x = layer.norm2(ad::add(x, ad::dropout(layer.ffn(x, p), p)));
  }
  return x;
}

void TransformerModel::encode_into(Graph& g, Encoded& enc) const {
  enc.memory = run_encoder(g, encoder_, enc.source.ids);
  if (enc.source.secondary) enc.memory2 = run_encoder(g, secondary_encoder_, *enc.source.secondary);
}

DecoderState TransformerModel::initial_state(Graph&, const Encoded&) const { return {}; }

Model::Logits TransformerModel::decode_all(Graph& g, const Encoded& enc,
                                           std::span<const int> inputs) const {
  const double p = config_.dropout;
  const bool multi = config_.family == Family::kMultiSourceTransformer;
  const bool copy = uses_copy(config_.family);
  const ad::Tensor mask = ad::causal_mask(inputs.size());
  Var x = embed(g, inputs);
  std::optional<Var> scores;
  for (std::size_t l = 0; l < decoder_.size(); ++l) {
    const DecoderLayer& layer = decoder_[l];
    const bool last = l + 1 == decoder_.size();
    x = layer.norm1(ad::add(x, ad::dropout(layer.self(x, x, &mask, p).output, p)));
    Var context;
    if (multi) {
      context = layer.multi(x, enc.memory, *enc.memory2, p).output;
    } else {
      ad::MultiHeadOutput cross = layer.cross(x, enc.memory, nullptr, p, copy && last);
      context = cross.output;
      if (copy && last) scores = cross.mean_scores;
    }
    x = layer.norm2(ad::add(x, ad::dropout(context, p)));
    x = layer.norm3(ad::add(x, ad::dropout(layer.ffn(x, p), p)));
  }
  Var gen = config_.tie_embeddings ? ad::matmul_nt(x, g.param(embed_.table())) : output_(x);
  return {gen, scores};
}

Model::Logits TransformerModel::decode_step(Graph& g, const Encoded& enc, DecoderState& state,
                                            int input_id) const {
  state.prefix.push_back(input_id);
  Logits all = decode_all(g, enc, state.prefix);
  const std::size_t last = state.prefix.size() - 1;
  Logits out{ad::slice_rows(all.gen, last, 1), std::nullopt};
  if (all.attn) out.attn = ad::slice_rows(*all.attn, last, 1);
  return out;
}

}  // namespace laqg::models::detail
