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
#include <span>
#include <vector>

#include "laqg/autodiff/graph.hpp"

namespace laqg::ad {

// Every operation treats its inputs as matrices (rank-1 = one row) and
// returns a rank-2 result. All are differentiable w.r.t. every Var input.

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
/// a[r, :] + row[0, :] for every row r.
Var add_row(Var a, Var row);
/// a[r, :] * row[0, :] for every row r.
Var mul_row(Var a, Var row);

Var matmul(Var a, Var b);
/// a × bᵀ without materializing the transpose.
Var matmul_nt(Var a, Var b);
Var transpose(Var a);

Var tanh(Var a);
Var sigmoid(Var a);
Var relu(Var a);

Var softmax_rows(Var a);
Var log_softmax_rows(Var a);
/// Per-row standardization to mean 0 and variance 1 (no affine part).
Var normalize_rows(Var a, double eps = 1e-9);
/// Inverted dropout; identity when the graph is not training or rate is 0.
Var dropout(Var a, double rate);

Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var slice_rows(Var a, std::size_t begin, std::size_t count);
Var slice_cols(Var a, std::size_t begin, std::size_t count);
/// Embedding lookup: result row i = table[ids[i], :].
Var gather_rows(Var table, std::span<const int> ids);

/// Replaces entries where mask != 0 with `fill`; those entries get no gradient.
Var mask_fill(Var a, const Tensor& mask, double fill);

/// Column reductions by group: result[r, g] reduces a[r, c] over all c with
/// group_of[c] == g. Every group must own at least one column.
Var segment_sum_cols(Var a, std::span<const int> group_of, std::size_t groups);
Var segment_max_cols(Var a, std::span<const int> group_of, std::size_t groups);
Var segment_logsumexp_cols(Var a, std::span<const int> group_of, std::size_t groups);

/// result[r, 0] = a[r, index[r]].
Var pick(Var a, std::span<const int> index);
Var sum(Var a);
Var mean(Var a);

}  // namespace laqg::ad
