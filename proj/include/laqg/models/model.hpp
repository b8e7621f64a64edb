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

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "laqg/autodiff/graph.hpp"
#include "laqg/autodiff/layers.hpp"
#include "laqg/data/example.hpp"
#include "laqg/models/config.hpp"
#include "laqg/models/copy.hpp"

namespace laqg::data {
class Vocab;
}

namespace laqg::models {

/// Model-ready source side of one example. `ids` are base-vocabulary ids
/// (OOV -> UNK); `ext` carries the extended-vocabulary view used by copy
/// families.
struct SourceInput {
  std::vector<int> ids;
  ExtendedSource ext;
  std::optional<std::vector<int>> secondary;
};

/// Source built from raw ids (no OOV text available); ids at or above
/// `base_size` are extended slots.
SourceInput source_from_ids(std::span<const int> ext_ids, std::size_t base_size,
                            std::optional<std::vector<int>> secondary = std::nullopt);

/// Source and target of a training pair. Targets end with EOS and use
/// extended ids when the family copies.
struct PreparedExample {
  SourceInput source;
  std::vector<int> target;
};

/// Truncates to the configured lengths, maps tokens through `vocab` and
/// attaches the secondary input when the family uses one.
PreparedExample prepare_example(const data::Example& ex, const data::Vocab& vocab,
                                const ModelConfig& config);
SourceInput prepare_source(const data::Example& ex, const data::Vocab& vocab,
                           const ModelConfig& config);

struct Encoded {
  ad::Var memory;                  // [src_len x d_model]
  std::optional<ad::Var> memory2;  // secondary encoder output (multi-source)
  std::vector<ad::LstmState> final_states;  // recurrent encoders only
  SourceInput source;              // as consumed, after truncation
};

/// Opaque per-hypothesis decoder state. LSTM families carry recurrent
/// layers plus the attentional feed vector; transformer families carry the
/// token prefix and recompute it.
struct DecoderState {
  std::vector<ad::LstmState> layers;
  std::optional<ad::Var> feed;
  std::vector<int> prefix;
};

struct StepOutput {
  ad::Var gen_logits;                  // [1 x vocab]
  std::optional<ad::Var> attn_logits;  // [1 x src_len], pre-normalization energies
  ad::Var log_probs;                   // [1 x output_size]
};

class Model {
 public:
  explicit Model(ModelConfig config) : config_(std::move(config)) {}
  virtual ~Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return config_; }
  ad::ParameterStore& params() { return params_; }
  const ad::ParameterStore& params() const { return params_; }

  /// Output support: extended vocabulary for copy families, base otherwise.
  std::size_t output_size(const SourceInput& src) const;

  Encoded encode(ad::Graph& g, const SourceInput& src) const;
  DecoderState start(ad::Graph& g, const Encoded& enc) const;
  /// Consumes `prev_token` (an output-space id) and predicts the next one.
  StepOutput step(ad::Graph& g, const Encoded& enc, DecoderState& state, int prev_token) const;

  /// Log-probabilities [len(target) x output_size] of each target token
  /// given BOS + target[:-1] (teacher forcing).
  ad::Var teacher_forced(ad::Graph& g, const Encoded& enc, std::span<const int> target) const;
  /// Summed negative log-likelihood of `target`.
  ad::Var loss(ad::Graph& g, const SourceInput& src, std::span<const int> target) const;

 protected:
  struct Logits {
    ad::Var gen;                   // [rows x vocab]
    std::optional<ad::Var> attn;   // [rows x src_len]
  };
  /// Fills memory (and memory2 / final_states) from enc.source.
  virtual void encode_into(ad::Graph& g, Encoded& enc) const = 0;
  virtual DecoderState initial_state(ad::Graph& g, const Encoded& enc) const = 0;
  virtual Logits decode_step(ad::Graph& g, const Encoded& enc, DecoderState& state,
                             int input_id) const = 0;
  /// Teacher-forced logits for decoder inputs `inputs` (base ids).
  virtual Logits decode_all(ad::Graph& g, const Encoded& enc, std::span<const int> inputs) const;

  /// Decoder input id for an output-space id (extended ids -> UNK).
  int input_id(int token) const;

  ModelConfig config_;
  ad::ParameterStore params_;

 private:
  ad::Var normalize(const Logits& logits, const SourceInput& src) const;
};

/// Deterministic construction; validates the config first.
std::unique_ptr<Model> build_model(const ModelConfig& config, std::uint64_t seed);

/// The copy channel of a transformer-copy step: the final decoder layer's
/// encoder-decoder attention energies averaged over heads.
ad::Var transformer_copy_scores(const Model& model, const StepOutput& step);

/// Copy score aggregation used by a family (sum for the copy families,
/// max for the maxout pointer).
CopyAggregation aggregation_for(Family f);

}  // namespace laqg::models
