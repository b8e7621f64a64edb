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

#include "laqg/models/multi_source.hpp"

#include "laqg/error.hpp"

namespace laqg::models {

MultiSourceAttention::MultiSourceAttention(ad::ParameterStore& store, const std::string& name,
                                           std::size_t d_model, std::size_t heads, Combine mode,
                                           std::mt19937_64& rng)
    : mode_(mode),
      primary_(store, name + ".primary", d_model, heads, rng),
      secondary_(store, name + ".secondary", d_model, heads, rng) {
  if (mode_ == Combine::kSerial) between_ = ad::LayerNorm(store, name + ".between", d_model);
}

MultiSourceContext MultiSourceAttention::operator()(ad::Var query, ad::Var primary_memory,
                                                    ad::Var secondary_memory, double attn_dropout,
                                                    bool keep_scores) const {
  if (primary_memory.cols() != secondary_memory.cols()) {
    throw DimensionError("multi-source: memory widths " + std::to_string(primary_memory.cols()) +
                         " and " + std::to_string(secondary_memory.cols()) + " differ");
  }
  ad::MultiHeadOutput p = primary_(query, primary_memory, nullptr, attn_dropout, keep_scores);
  ad::Var second_query = mode_ == Combine::kParallel ? query : between_(ad::add(query, p.output));
  ad::MultiHeadOutput s = secondary_(second_query, secondary_memory, nullptr, attn_dropout);
  return {ad::add(p.output, s.output), p.output, s.output, p.mean_scores};
}

}  // namespace laqg::models
