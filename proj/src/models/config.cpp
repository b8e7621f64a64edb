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

#include "laqg/models/config.hpp"

#include <array>
#include <utility>

#include "laqg/error.hpp"

namespace laqg::models {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 6> kFamilies = {{
    {Family::kLstmAttn, "lstm-attn"},
    {Family::kLstmCopy, "lstm-copy"},
    {Family::kLstmMaxout, "lstm-maxout"},
    {Family::kTransformer, "transformer"},
    {Family::kTransformerCopy, "transformer-copy"},
    {Family::kMultiSourceTransformer, "multi-source-transformer"},
}};

}  // namespace

std::string_view family_name(Family f) {
  for (auto [fam, name] : kFamilies)
    if (fam == f) return name;
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (auto [fam, n] : kFamilies)
    if (n == name) return fam;
  throw ConfigError("unknown model family '" + std::string(name) + "'");
}

std::string_view combine_name(Combine c) { return c == Combine::kParallel ? "parallel" : "serial"; }

Combine parse_combine(std::string_view name) {
  if (name == "parallel") return Combine::kParallel;
  if (name == "serial") return Combine::kSerial;
  throw ConfigError("unknown multi-source combine mode '" + std::string(name) + "'");
}

bool is_lstm(Family f) {
  return f == Family::kLstmAttn || f == Family::kLstmCopy || f == Family::kLstmMaxout;
}

bool is_transformer(Family f) { return !is_lstm(f); }

bool uses_copy(Family f) {
  return f == Family::kLstmCopy || f == Family::kLstmMaxout || f == Family::kTransformerCopy;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("invalid model config: " + msg); };
  if (enc_layers < 1 || dec_layers < 1) fail("layer counts must be at least 1");
  if (d_model < 1) fail("d_model must be positive");
  if (is_transformer(family)) {
    if (heads < 1 || d_model % heads != 0) {
      fail("d_model " + std::to_string(d_model) + " is not divisible by " +
           std::to_string(heads) + " heads");
    }
    if (d_model % 2 != 0) fail("transformer d_model must be even");
    if (d_ffn < 1) fail("d_ffn must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (vocab_size <= 4) fail("vocab_size must exceed the 4 reserved ids");
  if (max_src_len < 1 || max_tgt_len < 1) fail("maximum lengths must be positive");
}

ModelConfig preset(std::string_view name) {
  ModelConfig c;
  if (name == "default") return c;
  if (name == "iwslt_de_en") {
    c.enc_layers = c.dec_layers = 6;
    c.heads = 16;
    c.d_model = 1024;
    c.d_ffn = 4096;
    return c;
  }
  if (name == "wmt_en_de_big") {
    c.enc_layers = c.dec_layers = 6;
    c.heads = 4;
    c.d_model = 1024;
    c.d_ffn = 1024;
    return c;
  }
  if (name == "wmt_en_fr_big") {
    c.enc_layers = c.dec_layers = 16;
    c.heads = 16;
    c.d_model = 1024;
    c.d_ffn = 4096;
    return c;
  }
  throw ConfigError("unknown architecture preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  return {"default", "iwslt_de_en", "wmt_en_de_big", "wmt_en_fr_big"};
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"family", family_name(c.family)},
          {"enc_layers", c.enc_layers},
          {"dec_layers", c.dec_layers},
          {"heads", c.heads},
          {"d_model", c.d_model},
          {"d_ffn", c.d_ffn},
          {"dropout", c.dropout},
          {"vocab_size", c.vocab_size},
          {"max_src_len", c.max_src_len},
          {"max_tgt_len", c.max_tgt_len},
          {"combine", combine_name(c.combine)},
          {"positions", c.positions == Positions::kSinusoidal ? "sinusoidal" : "learned"},
          {"tie_embeddings", c.tie_embeddings}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  try {
    ModelConfig c;
    c.family = parse_family(j.at("family").get<std::string>());
    c.enc_layers = j.at("enc_layers").get<std::size_t>();
    c.dec_layers = j.at("dec_layers").get<std::size_t>();
    c.heads = j.at("heads").get<std::size_t>();
    c.d_model = j.at("d_model").get<std::size_t>();
    c.d_ffn = j.at("d_ffn").get<std::size_t>();
    c.dropout = j.at("dropout").get<double>();
    c.vocab_size = j.at("vocab_size").get<std::size_t>();
    c.max_src_len = j.at("max_src_len").get<std::size_t>();
    c.max_tgt_len = j.at("max_tgt_len").get<std::size_t>();
    c.combine = parse_combine(j.value("combine", "parallel"));
    const std::string pos = j.value("positions", "sinusoidal");
    if (pos != "sinusoidal" && pos != "learned") throw ConfigError("unknown positions '" + pos + "'");
    c.positions = pos == "learned" ? Positions::kLearned : Positions::kSinusoidal;
    c.tie_embeddings = j.value("tie_embeddings", false);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model config: ") + e.what());
  }
}

}  // namespace laqg::models
