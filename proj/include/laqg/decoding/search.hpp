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

#include <any>
#include <cstddef>
#include <string>
#include <vector>

#include "laqg/autodiff/tensor.hpp"
#include "laqg/models/model.hpp"

namespace laqg::data {
class Vocab;
}

namespace laqg::decoding {

/// Anything that yields next-token log-probabilities. `step` consumes
/// `token` (BOS first), updates `state` and returns log-probs over the
/// output space. States must be copyable so hypotheses can branch.
class StepModel {
 public:
  virtual ~StepModel() = default;
  virtual std::any start() = 0;
  virtual std::vector<double> step(std::any& state, int token) = 0;
};

struct Hypothesis {
  std::vector<int> tokens;  // excludes BOS and the terminal EOS
  double log_prob = 0.0;    // includes the EOS step when finished
  double score = 0.0;       // length-normalized log_prob
  bool finished = false;    // ended with EOS rather than the length cap
};

/// Argmax at every step (ties -> lowest id); PAD and BOS are never emitted.
/// Stops at EOS or after `max_len` tokens.
Hypothesis greedy_decode(StepModel& model, std::size_t max_len);

/// Beam search; hypotheses are ranked by log_prob / length^length_penalty
/// where length counts emitted tokens including EOS. Width < 1 is a config
/// error.
Hypothesis beam_search(StepModel& model, std::size_t width, double length_penalty,
                       std::size_t max_len);

/// Total log-probability the model assigns to `tokens` (plus EOS when
/// `with_eos`).
double sequence_log_prob(StepModel& model, const std::vector<int>& tokens, bool with_eos);

/// Adapter running a trained model on one source in evaluation mode. Each
/// step builds a fresh graph; encoder memory and recurrent state are carried
/// as plain tensors, so memory stays bounded and instances are independent.
class ModelStepper final : public StepModel {
 public:
  ModelStepper(const models::Model& model, const models::SourceInput& source);

  std::any start() override;
  std::vector<double> step(std::any& state, int token) override;

  const models::SourceInput& source() const { return source_; }

 private:
  struct Frozen {
    std::vector<std::pair<ad::Tensor, ad::Tensor>> layers;
    std::optional<ad::Tensor> feed;
    std::vector<int> prefix;
  };
  models::Encoded thaw(ad::Graph& g) const;

  const models::Model& model_;
  models::SourceInput source_;
  ad::Tensor memory_;
  std::optional<ad::Tensor> memory2_;
  std::vector<std::pair<ad::Tensor, ad::Tensor>> final_states_;
};

/// Renders output-space ids as text; extended ids become the source token.
std::string render(const std::vector<int>& tokens, const models::SourceInput& source,
                   const data::Vocab& vocab);

struct DecodeOptions {
  std::size_t beam_width = 5;
  double length_penalty = 0.0;
  std::size_t max_len = 40;
};

/// Greedy when beam_width == 1, beam search otherwise.
Hypothesis decode(const models::Model& model, const models::SourceInput& source,
                  const DecodeOptions& options);

}  // namespace laqg::decoding
