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

#include <random>
#include <vector>

#include "laqg/autodiff/layers.hpp"
#include "laqg/models/model.hpp"
#include "laqg/models/multi_source.hpp"

namespace laqg::models::detail {

/// Recurrent encoder-decoder with Luong global attention and input feeding;
/// copy families add the pointer channel over the attention energies.
class LstmModel final : public Model {
 public:
  LstmModel(const ModelConfig& config, std::uint64_t seed);

 protected:
  void encode_into(ad::Graph& g, Encoded& enc) const override;
  DecoderState initial_state(ad::Graph& g, const Encoded& enc) const override;
  Logits decode_step(ad::Graph& g, const Encoded& enc, DecoderState& state,
                     int input_id) const override;

 private:
  ad::Embedding src_embed_, tgt_embed_;
  std::vector<ad::LstmCell> encoder_, decoder_;
  ad::BilinearAttention attention_;
  ad::Linear combine_, output_;
};

/// Post-norm transformer; the multi-source family adds a second encoder
/// stack (sharing the embedding table) and two-memory decoder attention.
class TransformerModel final : public Model {
 public:
  TransformerModel(const ModelConfig& config, std::uint64_t seed);

 protected:
  void encode_into(ad::Graph& g, Encoded& enc) const override;
  DecoderState initial_state(ad::Graph& g, const Encoded& enc) const override;
  Logits decode_step(ad::Graph& g, const Encoded& enc, DecoderState& state,
                     int input_id) const override;
  Logits decode_all(ad::Graph& g, const Encoded& enc, std::span<const int> inputs) const override;

 private:
  struct EncoderLayer {
    ad::MultiHeadAttention self;
    ad::LayerNorm norm1;
    ad::FeedForward ffn;
    ad::LayerNorm norm2;
  };
  struct DecoderLayer {
    ad::MultiHeadAttention self;
    ad::LayerNorm norm1;
    ad::MultiHeadAttention cross;
    MultiSourceAttention multi;
    ad::LayerNorm norm2;
    ad::FeedForward ffn;
    ad::LayerNorm norm3;
  };

  std::vector<EncoderLayer> make_encoder(const std::string& name, std::mt19937_64& rng);
  ad::Var embed(ad::Graph& g, std::span<const int> ids) const;
  ad::Var run_encoder(ad::Graph& g, const std::vector<EncoderLayer>& layers,
                      std::span<const int> ids) const;

  ad::Embedding embed_;
  ad::Embedding learned_positions_;
  ad::Tensor sinusoid_;
  std::vector<EncoderLayer> encoder_, secondary_encoder_;
  std::vector<DecoderLayer> decoder_;
  ad::Linear output_;
};

}  // namespace laqg::models::detail
