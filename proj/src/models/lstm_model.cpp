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

#include <random>

#include "families.hpp"

namespace laqg::models::detail {

using ad::Graph;
using ad::Var;

LstmModel::LstmModel(const ModelConfig& config, std::uint64_t seed) : Model(config) {
  std::mt19937_64 rng(seed);
  const std::size_t d = config_.d_model;
  src_embed_ = ad::Embedding(params_, "encoder.embed", config_.vocab_size, d, rng);
  tgt_embed_ = ad::Embedding(params_, "decoder.embed", config_.vocab_size, d, rng);
  for (std::size_t l = 0; l < config_.enc_layers; ++l)
    encoder_.emplace_back(params_, "encoder.lstm" + std::to_string(l), d, d, rng);
  for (std::size_t l = 0; l < config_.dec_layers; ++l)
    decoder_.emplace_back(params_, "decoder.lstm" + std::to_string(l), l == 0 ? 2 * d : d, d, rng);
  attention_ = ad::BilinearAttention(params_, "decoder.attention", d, d, rng);
  combine_ = ad::Linear(params_, "decoder.combine", 2 * d, d, rng, false);
  if (!config_.tie_embeddings) output_ = ad::Linear(params_, "decoder.output", d, config_.vocab_size, rng);
}

void LstmModel::encode_into(Graph& g, Encoded& enc) const {
  const double p = config_.dropout;
  Var x = ad::dropout(src_embed_(g, enc.source.ids), p);
  const std::size_t n = enc.source.ids.size();
  for (std::size_t l = 0; l < encoder_.size(); ++l) {
    ad::LstmState s = encoder_[l].zero_state(g);
    std::vector<Var> outputs;
    outputs.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      s = encoder_[l].step(ad::slice_rows(x, t, 1), s);
      outputs.push_back(s.h);
    }
    enc.final_states.push_back(s);
    x = ad::concat_rows(outputs);
    if (l + 1 < encoder_.size()) x = ad::dropout(x, p);
  }
  enc.memory = x;
}

DecoderState LstmModel::initial_state(Graph& g, const Encoded& enc) const {
  DecoderState state;
  for (std::size_t l = 0; l < decoder_.size(); ++l) {
    state.layers.push_back(l < enc.final_states.size() ? enc.final_states[l]
                                                       : decoder_[l].zero_state(g));
  }
  state.feed = g.constant(ad::Tensor::matrix(1, config_.d_model));
  return state;
}

Model::Logits LstmModel::decode_step(Graph& g, const Encoded& enc, DecoderState& state,
                                     int input_id) const {
  const double p = config_.dropout;
  const int ids[] = {input_id};
  const Var parts[] = {ad::dropout(tgt_embed_(g, ids), p), *state.feed};
  Var x = ad::concat_cols(parts);
  for (std::size_t l = 0; l < decoder_.size(); ++l) {
    state.layers[l] = decoder_[l].step(x, state.layers[l]);
    x = state.layers[l].h;
    if (l + 1 < decoder_.size()) x = ad::dropout(x, p);
  }
  const Var top = state.layers.back().h;
  ad::AttentionResult a = attention_(top, enc.memory, enc.memory);
  const Var joined[] = {a.context, top};
  Var attentional = ad::tanh(combine_(ad::concat_cols(joined)));
  state.feed = attentional;
  Var h = ad::dropout(attentional, p);
  Var gen = config_.tie_embeddings ? ad::matmul_nt(h, g.param(tgt_embed_.table())) : output_(h);
  return {gen, a.scores};
}

}  // namespace laqg::models::detail
