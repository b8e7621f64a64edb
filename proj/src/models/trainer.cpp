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

#include "laqg/models/trainer.hpp"

#include <chrono>
#include <numeric>
#include <ostream>
#include <random>

#include "json.hpp"
#include "laqg/data/vocab.hpp"
#include "laqg/error.hpp"

namespace laqg::models {

namespace {

std::size_t token_count(const PreparedExample& ex) {
  std::size_t n = 0;
  for (int t : ex.target)
    if (t != data::Vocab::kPad) ++n;
  return n;
}

}  // namespace

TrainResult train(Model& model, std::span<const PreparedExample> data, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  if (data.empty()) throw ContractError("train: empty dataset");
  if (config.batch_size == 0) throw ConfigError("train: batch_size must be positive");
  std::mt19937_64 rng(config.seed);
  ad::Adam adam(config.adam);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  TrainResult result;
  std::uint64_t graph_seed = config.seed * 0x9E3779B97F4A7C15ULL;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double loss_total = 0.0;
    std::size_t token_total = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::size_t batch_tokens = 0;
      for (std::size_t i = begin; i < end; ++i) batch_tokens += token_count(data[order[i]]);
      if (batch_tokens == 0) continue;
      model.params().zero_grad();
      for (std::size_t i = begin; i < end; ++i) {
        const PreparedExample& ex = data[order[i]];
        ad::Graph g(true, ++graph_seed);
        ad::Var loss = model.loss(g, ex.source, ex.target);
        loss_total += loss.value().item();
        g.backward(loss, 1.0 / static_cast<double>(batch_tokens));
      }
      token_total += batch_tokens;
      if (config.clip_norm > 0.0) ad::clip_grad_norm(model.params(), config.clip_norm);
      adam.step(model.params());
      ++result.steps;
    }
    EpochRecord record{epoch, loss_total / static_cast<double>(std::max<std::size_t>(token_total, 1)),
                       std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()};
    result.log.push_back(record);
    if (on_epoch) on_epoch(record);
    if (config.stop_below && record.mean_loss < *config.stop_below) break;
  }
  return result;
}

double mean_token_loss(const Model& model, std::span<const PreparedExample> data) {
  if (data.empty()) throw ContractError("mean_token_loss: empty dataset");
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto& ex : data) {
    ad::Graph g(false);
    total += model.loss(g, ex.source, ex.target).value().item();
    tokens += token_count(ex);
  }
  return total / static_cast<double>(tokens);
}

void write_epoch_record(std::ostream& out, const EpochRecord& record) {
  nlohmann::json j{{"epoch", record.epoch}, {"mean_loss", record.mean_loss}, {"seconds", record.seconds}};
  out << j.dump() << '\n';
}

}  // namespace laqg::models
