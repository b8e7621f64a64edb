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
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "laqg/autodiff/adam.hpp"
#include "laqg/models/model.hpp"

namespace laqg::models {

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;  // examples per Adam step
  ad::AdamConfig adam;
  double clip_norm = 0.0;  // 0 disables clipping
  std::uint64_t seed = 1;
  bool shuffle = true;
  /// Stop once an epoch's mean per-token loss falls below this value.
  std::optional<double> stop_below;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_loss = 0.0;  // per target token, natural log
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  std::uint64_t steps = 0;
};

/// Minimizes the mean per-token negative log-likelihood with Adam under
/// teacher forcing. Deterministic given the config seed.
TrainResult train(Model& model, std::span<const PreparedExample> data, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Mean per-token negative log-likelihood in evaluation mode.
double mean_token_loss(const Model& model, std::span<const PreparedExample> data);

/// One JSON object per line: {"epoch", "mean_loss", "seconds"}.
void write_epoch_record(std::ostream& out, const EpochRecord& record);

}  // namespace laqg::models
