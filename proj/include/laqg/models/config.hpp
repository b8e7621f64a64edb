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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace laqg::models {

enum class Family {
  kLstmAttn,
  kLstmCopy,
  kLstmMaxout,
  kTransformer,
  kTransformerCopy,
  kMultiSourceTransformer,
};

/// How a multi-source decoder merges its two encoder-attention contexts.
enum class Combine { kParallel, kSerial };

enum class Positions { kSinusoidal, kLearned };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);
std::string_view combine_name(Combine c);
Combine parse_combine(std::string_view name);

bool is_lstm(Family f);
bool is_transformer(Family f);
bool uses_copy(Family f);

struct ModelConfig {
  Family family = Family::kTransformer;
  std::size_t enc_layers = 5;
  std::size_t dec_layers = 5;
  std::size_t heads = 8;
  std::size_t d_model = 512;
  std::size_t d_ffn = 2048;
  double dropout = 0.3;
  std::size_t vocab_size = 0;
  std::size_t max_src_len = 250;
  std::size_t max_tgt_len = 40;
  Combine combine = Combine::kParallel;
  Positions positions = Positions::kSinusoidal;
  bool tie_embeddings = false;

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Named architecture presets: "default" plus the three translation
/// presets iwslt_de_en, wmt_en_de_big and wmt_en_fr_big. Presets fix the
/// architecture fields only; vocab_size stays 0 until data is known.
ModelConfig preset(std::string_view name);
std::vector<std::string> preset_names();

nlohmann::json to_json(const ModelConfig& c);
ModelConfig config_from_json(const nlohmann::json& j);

}  // namespace laqg::models
