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

#include <optional>
#include <random>
#include <string>

#include "laqg/autodiff/layers.hpp"
#include "laqg/models/config.hpp"

namespace laqg::models {

struct MultiSourceContext {
  ad::Var output;     // combined context fed to the decoder residual
  ad::Var primary;    // attention over the primary memory
  ad::Var secondary;  // attention over the secondary memory
  std::optional<ad::Var> primary_scores;
};

/// Encoder-decoder attention over two memories. Parallel mode attends to
/// both from the same query and sums the contexts; serial mode attends to
/// the primary memory, applies the residual and layer norm, and attends to
/// the secondary memory from that result. Either way the output is
/// primary + secondary context.
class MultiSourceAttention {
 public:
  MultiSourceAttention() = default;
  MultiSourceAttention(ad::ParameterStore& store, const std::string& name, std::size_t d_model,
                       std::size_t heads, Combine mode, std::mt19937_64& rng);

  MultiSourceContext operator()(ad::Var query, ad::Var primary_memory, ad::Var secondary_memory,
                                double attn_dropout, bool keep_scores = false) const;

  Combine mode() const { return mode_; }
  ad::MultiHeadAttention& primary() { return primary_; }
  ad::MultiHeadAttention& secondary() { return secondary_; }

 private:
  Combine mode_ = Combine::kParallel;
  ad::MultiHeadAttention primary_, secondary_;
  ad::LayerNorm between_;
};

}  // namespace laqg::models
