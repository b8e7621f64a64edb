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

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "laqg/autodiff/graph.hpp"
#include "laqg/autodiff/ops.hpp"

namespace laqg::ad {

/// Glorot/Xavier uniform: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
Tensor xavier_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng);

/// Sinusoidal table: row p, column 2i = sin(p / 10000^(2i/d)), column
/// 2i+1 = cos of the same angle. `d_model` must be even.
Tensor positional_encoding(std::size_t max_len, std::size_t d_model);

/// Mean negative log-likelihood of `targets` under row-wise softmax of
/// `logits`, skipping rows whose target is `pad_id`.
Var cross_entropy(Var logits, std::span<const int> targets, int pad_id);

/// Sum of -log_probs[r, targets[r]] over rows whose target is not `pad_id`.
/// `log_probs` must already be normalized.
Var nll_sum(Var log_probs, std::span<const int> targets, int pad_id);

struct LstmState {
  Var h;
  Var c;
};

/// Gate layout along the 4h axis: input, forget, cell candidate, output.
LstmState lstm_step(Var x, const LstmState& prev, Var w_input, Var w_hidden, Var bias);

struct AttentionResult {
  Var context;  // [queries x value_dim]
  Var weights;  // [queries x keys], rows sum to 1
  Var scores;   // [queries x keys], pre-normalization energies
};

/// Dot-product attention of each query row over `keys`. `mask` (optional,
/// [queries x keys] or [1 x keys]) marks positions to ignore with nonzero
/// entries; a fully masked row is a contract error.
AttentionResult global_attention(Var query, Var keys, Var values, const Tensor* mask = nullptr,
                                 double scale = 1.0);

class Linear {
 public:
  Linear() = default;
  Linear(ParameterStore& store, const std::string& name, std::size_t in, std::size_t out,
         std::mt19937_64& rng, bool bias = true);

  Var operator()(Var x) const;
  std::size_t in_features() const { return weight_->value.rows(); }
  std::size_t out_features() const { return weight_->value.cols(); }
  Parameter& weight() const { return *weight_; }
  Parameter* bias() const { return bias_; }

 private:
  Parameter* weight_ = nullptr;
  Parameter* bias_ = nullptr;
};

class Embedding {
 public:
  Embedding() = default;
  Embedding(ParameterStore& store, const std::string& name, std::size_t vocab, std::size_t dim,
            std::mt19937_64& rng);

  Var operator()(Graph& g, std::span<const int> ids) const;
  std::size_t vocab_size() const { return table_->value.rows(); }
  std::size_t dim() const { return table_->value.cols(); }
  Parameter& table() const { return *table_; }

 private:
  Parameter* table_ = nullptr;
};

class LstmCell {
 public:
  LstmCell() = default;
  LstmCell(ParameterStore& store, const std::string& name, std::size_t input, std::size_t hidden,
           std::mt19937_64& rng);

  LstmState step(Var x, const LstmState& prev) const;
  LstmState zero_state(Graph& g) const;
  std::size_t hidden_size() const { return w_hidden_->value.rows(); }

 private:
  Parameter* w_input_ = nullptr;
  Parameter* w_hidden_ = nullptr;
  Parameter* bias_ = nullptr;
};

/// Luong "general" global attention: score(q, k) = q · W · k.
class BilinearAttention {
 public:
  BilinearAttention() = default;
  BilinearAttention(ParameterStore& store, const std::string& name, std::size_t query_dim,
                    std::size_t key_dim, std::mt19937_64& rng);

  AttentionResult operator()(Var query, Var keys, Var values, const Tensor* mask = nullptr) const;

 private:
  Parameter* weight_ = nullptr;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParameterStore& store, const std::string& name, std::size_t dim);
  Var operator()(Var x) const;

 private:
  Parameter* gain_ = nullptr;
  Parameter* bias_ = nullptr;
};

struct MultiHeadOutput {
  Var output;                   // [queries x d_model]
  std::optional<Var> mean_scores;  // [queries x keys], scaled energies averaged over heads
};

/// Scaled dot-product attention split over `heads`, concatenated and
/// projected back to d_model.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParameterStore& store, const std::string& name, std::size_t d_model,
                     std::size_t heads, std::mt19937_64& rng);

  /// `mask` marks blocked (query, key) pairs with nonzero entries.
  MultiHeadOutput operator()(Var query, Var memory, const Tensor* mask, double attn_dropout,
                             bool keep_scores = false) const;

  std::size_t heads() const { return heads_; }
  Linear& q_proj() { return q_; }
  Linear& k_proj() { return k_; }
  Linear& v_proj() { return v_; }
  Linear& out_proj() { return o_; }

 private:
  std::size_t heads_ = 1;
  Linear q_, k_, v_, o_;
};

/// Position-wise two-layer ReLU network.
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParameterStore& store, const std::string& name, std::size_t d_model,
              std::size_t d_ffn, std::mt19937_64& rng);
  Var operator()(Var x, double dropout_rate) const;

 private:
  Linear in_, out_;
};

/// Causal mask for self-attention over `n` positions: entry (i, j) is 1
/// when j > i.
Tensor causal_mask(std::size_t n);

}  // namespace laqg::ad
