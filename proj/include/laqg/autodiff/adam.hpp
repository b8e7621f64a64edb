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
#include <vector>

#include "laqg/autodiff/graph.hpp"

namespace laqg::ad {

struct AdamConfig {
  double lr = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
};

/// Per-parameter moments plus the shared step counter.
struct AdamState {
  AdamConfig config;
  std::uint64_t t = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

/// One bias-corrected Adam update of `params` from `grads`. Moments are
/// created on the first call; afterwards their shapes must keep matching.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
               AdamState& state);

/// Adam over a ParameterStore, reading Parameter::grad.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) { state_.config = config; }

  void step(ParameterStore& store);
  const AdamState& state() const { return state_; }
  std::uint64_t steps() const { return state_.t; }

 private:
  AdamState state_;
};

/// Rescales all gradients so their global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_grad_norm(ParameterStore& store, double max_norm);

}  // namespace laqg::ad
