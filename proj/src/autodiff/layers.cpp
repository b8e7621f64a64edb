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

#include "laqg/autodiff/layers.hpp"

#include <cmath>

#include "laqg/error.hpp"

namespace laqg::ad {

Tensor xavier_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-a, a);
  Tensor t = Tensor::matrix(fan_in, fan_out);
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

Tensor positional_encoding(std::size_t max_len, std::size_t d_model) {
  if (d_model == 0 || d_model % 2 != 0) {
    throw ConfigError("positional encoding needs an even d_model, got " +
                      std::to_string(d_model));
  }
  Tensor pe = Tensor::matrix(max_len, d_model);
  for (std::size_t pos = 0; pos < max_len; ++pos) {
    for (std::size_t i = 0; i < d_model / 2; ++i) {
      const double angle = static_cast<double>(pos) /
                           std::pow(10000.0, 2.0 * static_cast<double>(i) /
                                                 static_cast<double>(d_model));
      pe(pos, 2 * i) = std::sin(angle);
      pe(pos, 2 * i + 1) = std::cos(angle);
    }
  }
  return pe;
}

Var nll_sum(Var log_probs, std::span<const int> targets, int pad_id) {
  const std::size_t rows = log_probs.rows();
  const std::size_t vocab = log_probs.cols();
  if (targets.size() != rows) {
    throw DimensionError("nll: " + std::to_string(targets.size()) + " targets for " +
                         std::to_string(rows) + " rows");
  }
  std::vector<int> index(rows, 0);
  Tensor weight = Tensor::matrix(rows, 1);
  std::size_t count = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (targets[r] == pad_id) continue;
    if (targets[r] < 0 || static_cast<std::size_t>(targets[r]) >= vocab) {
      throw DataError("target id " + std::to_string(targets[r]) + " outside vocabulary of " +
                      std::to_string(vocab));
    }
    index[r] = targets[r];
    weight(r, 0) = -1.0;
    ++count;
  }
  if (count == 0) throw ContractError("nll: every target is padding, no tokens to score");
  Graph& g = log_probs.graph();
  return sum(mul(pick(log_probs, index), g.constant(std::move(weight))));
}

Var cross_entropy(Var logits, std::span<const int> targets, int pad_id) {
  std::size_t count = 0;
  for (int t : targets)
    if (t != pad_id) ++count;
  if (count == 0) throw ContractError("cross_entropy: every target is padding");
  return scale(nll_sum(log_softmax_rows(logits), targets, pad_id), 1.0 / static_cast<double>(count));
}

LstmState lstm_step(Var x, const LstmState& prev, Var w_input, Var w_hidden, Var bias) {
  const std::size_t h = w_hidden.rows();
  if (w_hidden.cols() != 4 * h || w_input.cols() != 4 * h || bias.cols() != 4 * h) {
    throw DimensionError("lstm_step: weights must have 4*hidden columns");
  }
  if (prev.h.cols() != h || prev.c.cols() != h) {
    throw DimensionError("lstm_step: state width " + std::to_string(prev.h.cols()) +
                         " does not match hidden size " + std::to_string(h));
  }
  Var gates = add_row(add(matmul(x, w_input), matmul(prev.h, w_hidden)), bias);
  Var i = sigmoid(slice_cols(gates, 0, h));
  Var f = sigmoid(slice_cols(gates, h, h));
  Var cand = tanh(slice_cols(gates, 2 * h, h));
  Var o = sigmoid(slice_cols(gates, 3 * h, h));
  Var c = add(mul(f, prev.c), mul(i, cand));
  return {mul(o, tanh(c)), c};
}

AttentionResult global_attention(Var query, Var keys, Var values, const Tensor* mask,
                                 double scale_factor) {
  if (keys.rows() != values.rows()) {
    throw DimensionError("attention: " + std::to_string(keys.rows()) + " keys but " +
                         std::to_string(values.rows()) + " values");
  }
  Var scores = matmul_nt(query, keys);
  if (scale_factor != 1.0) scores = scale(scores, scale_factor);
  Var masked = scores;
  if (mask) {
    const std::size_t q = scores.rows(), k = scores.cols();
    Tensor full = Tensor::matrix(q, k);
    if (mask->size() == k) {
      for (std::size_t r = 0; r < q; ++r)
        for (std::size_t c = 0; c < k; ++c) full(r, c) = (*mask)[c];
    } else if (mask->size() == q * k) {
      full = Tensor({q, k}, std::vector<double>(mask->data().begin(), mask->data().end()));
    } else {
      throw DimensionError("attention: mask " + shape_string(mask->shape()) +
                           " does not fit scores " + shape_string(scores.value().shape()));
    }
    for (std::size_t r = 0; r < q; ++r) {
      bool open = false;
      for (std::size_t c = 0; c < k && !open; ++c) open = full(r, c) == 0.0;
      if (!open) throw ContractError("attention: every key position is masked");
    }
    masked = mask_fill(scores, full, -1e9);
  }
  Var weights = softmax_rows(masked);
  return {matmul(weights, values), weights, scores};
}

Linear::Linear(ParameterStore& store, const std::string& name, std::size_t in, std::size_t out,
               std::mt19937_64& rng, bool bias) {
  weight_ = &store.add(name + ".weight", xavier_uniform(in, out, rng));
  if (bias) bias_ = &store.add(name + ".bias", Tensor::matrix(1, out));
}

Var Linear::operator()(Var x) const {
  Graph& g = x.graph();
  Var y = matmul(x, g.param(*weight_));
  return bias_ ? add_row(y, g.param(*bias_)) : y;
}

Embedding::Embedding(ParameterStore& store, const std::string& name, std::size_t vocab,
                     std::size_t dim, std::mt19937_64& rng) {
  table_ = &store.add(name + ".table", xavier_uniform(vocab, dim, rng));
}

Var Embedding::operator()(Graph& g, std::span<const int> ids) const {
  return gather_rows(g.param(*table_), ids);
}

LstmCell::LstmCell(ParameterStore& store, const std::string& name, std::size_t input,
                   std::size_t hidden, std::mt19937_64& rng) {
  w_input_ = &store.add(name + ".w_input", xavier_uniform(input, 4 * hidden, rng));
  w_hidden_ = &store.add(name + ".w_hidden", xavier_uniform(hidden, 4 * hidden, rng));
  bias_ = &store.add(name + ".bias", Tensor::matrix(1, 4 * hidden));
}

LstmState LstmCell::step(Var x, const LstmState& prev) const {
  Graph& g = x.graph();
  return lstm_step(x, prev, g.param(*w_input_), g.param(*w_hidden_), g.param(*bias_));
}

LstmState LstmCell::zero_state(Graph& g) const {
  const std::size_t h = hidden_size();
  return {g.constant(Tensor::matrix(1, h)), g.constant(Tensor::matrix(1, h))};
}

BilinearAttention::BilinearAttention(ParameterStore& store, const std::string& name,
                                     std::size_t query_dim, std::size_t key_dim,
                                     std::mt19937_64& rng) {
  weight_ = &store.add(name + ".weight", xavier_uniform(query_dim, key_dim, rng));
}

AttentionResult BilinearAttention::operator()(Var query, Var keys, Var values,
                                              const Tensor* mask) const {
  Var projected = matmul(query, query.graph().param(*weight_));
  return global_attention(projected, keys, values, mask);
}

LayerNorm::LayerNorm(ParameterStore& store, const std::string& name, std::size_t dim) {
  gain_ = &store.add(name + ".gain", Tensor(Shape{1, dim}, 1.0));
  bias_ = &store.add(name + ".bias", Tensor::matrix(1, dim));
}

Var LayerNorm::operator()(Var x) const {
  Graph& g = x.graph();
  return add_row(mul_row(normalize_rows(x), g.param(*gain_)), g.param(*bias_));
}

MultiHeadAttention::MultiHeadAttention(ParameterStore& store, const std::string& name,
                                       std::size_t d_model, std::size_t heads,
                                       std::mt19937_64& rng)
    : heads_(heads) {
  if (heads == 0 || d_model % heads != 0) {
    throw ConfigError("d_model " + std::to_string(d_model) + " is not divisible by " +
                      std::to_string(heads) + " heads");
  }
  q_ = Linear(store, name + ".q", d_model, d_model, rng);
  k_ = Linear(store, name + ".k", d_model, d_model, rng);
  v_ = Linear(store, name + ".v", d_model, d_model, rng);
  o_ = Linear(store, name + ".out", d_model, d_model, rng);
}

MultiHeadOutput MultiHeadAttention::operator()(Var query, Var memory, const Tensor* mask,
                                               double attn_dropout, bool keep_scores) const {
  const std::size_t d_model = q_.out_features();
  if (query.cols() != d_model || memory.cols() != d_model) {
    throw DimensionError("multi-head attention expects width " + std::to_string(d_model));
  }
  const std::size_t dk = d_model / heads_;
  const double s = 1.0 / std::sqrt(static_cast<double>(dk));
  Var q = q_(query);
  Var k = k_(memory);
  Var v = v_(memory);
  std::vector<Var> contexts;
  std::optional<Var> score_total;
  for (std::size_t h = 0; h < heads_; ++h) {
    Var qh = heads_ == 1 ? q : slice_cols(q, h * dk, dk);
    Var kh = heads_ == 1 ? k : slice_cols(k, h * dk, dk);
    Var vh = heads_ == 1 ? v : slice_cols(v, h * dk, dk);
    AttentionResult a = global_attention(qh, kh, vh, mask, s);
    if (attn_dropout > 0.0 && query.graph().training()) {
      a.context = matmul(dropout(a.weights, attn_dropout), vh);
    }
    contexts.push_back(a.context);
    if (keep_scores) score_total = score_total ? add(*score_total, a.scores) : a.scores;
  }
  Var joined = heads_ == 1 ? contexts[0] : concat_cols(contexts);
  MultiHeadOutput out{o_(joined), std::nullopt};
  if (keep_scores) {
    out.mean_scores = heads_ == 1 ? *score_total
                                  : scale(*score_total, 1.0 / static_cast<double>(heads_));
  }
  return out;
}

FeedForward::FeedForward(ParameterStore& store, const std::string& name, std::size_t d_model,
                         std::size_t d_ffn, std::mt19937_64& rng)
    : in_(store, name + ".in", d_model, d_ffn, rng), out_(store, name + ".out", d_ffn, d_model, rng) {}

Var FeedForward::operator()(Var x, double dropout_rate) const {
  return out_(dropout(relu(in_(x)), dropout_rate));
}

Tensor causal_mask(std::size_t n) {
  Tensor m = Tensor::matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = 1.0;
  return m;
}

}  // namespace laqg::ad
