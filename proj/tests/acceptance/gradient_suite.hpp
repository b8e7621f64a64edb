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

// Finite-difference coverage of every differentiable op and every layer,
// each instantiated at a fresh random shape per trial.

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "laqg/autodiff/layers.hpp"
#include "laqg/autodiff/ops.hpp"
#include "laqg/models/copy.hpp"
#include "laqg/models/model.hpp"
#include "laqg/models/multi_source.hpp"
#include "toy.hpp"

namespace laqg::testing {

struct GradientCase {
  std::string name;
  std::function<GradCheckResult(std::mt19937_64&)> run;
};

namespace gradient_detail {

using ad::ParameterStore;

inline std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

inline std::vector<int> random_ids(std::mt19937_64& rng, std::size_t n, std::size_t bound) {
  std::vector<int> ids(n);
  for (auto& id : ids) id = static_cast<int>(rng() % bound);
  return ids;
}

/// Nonzero entries block a position; every row keeps at least one open key.
inline Tensor random_mask(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  Tensor m = Tensor::matrix(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t open = rng() % cols;
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = (c != open && rng() % 2 == 0) ? 1.0 : 0.0;
  }
  return m;
}

/// Column-to-group map in which every group owns at least one column.
inline std::vector<int> random_groups(std::mt19937_64& rng, std::size_t cols, std::size_t groups) {
  std::vector<int> g(cols);
  for (std::size_t c = 0; c < cols; ++c) g[c] = c < groups ? static_cast<int>(c) : static_cast<int>(rng() % groups);
  std::shuffle(g.begin(), g.end(), rng);
  return g;
}

/// Source ids over `base` in-vocabulary words plus a dense run of
/// extended (copy-only) ids, with repetitions.
inline std::vector<int> random_extended(std::mt19937_64& rng, std::size_t n, std::size_t base) {
  const std::size_t oov = std::min<std::size_t>(n, rng() % 3);
  std::vector<int> ids = random_ids(rng, n, base + oov);
  for (std::size_t k = 0; k < oov; ++k) ids[k] = static_cast<int>(base + k);
  std::shuffle(ids.begin(), ids.end(), rng);
  return ids;
}

using Unary = Var (*)(Var);

inline GradientCase unary(std::string name, Unary f, double lo = -1.0, double hi = 1.0,
                          std::size_t min_cols = 1) {
  return {std::move(name), [f, lo, hi, min_cols](std::mt19937_64& rng) {
            const std::size_t r = draw(rng, 1, 4), c = draw(rng, min_cols, 5);
            return grad_check([f](Graph&, std::vector<Var>& v) { return f(v[0]); },
                              {random_tensor(r, c, rng, lo, hi)});
          }};
}

using Binary = Var (*)(Var, Var);

inline GradientCase binary(std::string name, Binary f) {
  return {std::move(name), [f](std::mt19937_64& rng) {
            const std::size_t r = draw(rng, 1, 4), c = draw(rng, 1, 5);
            return grad_check([f](Graph&, std::vector<Var>& v) { return f(v[0], v[1]); },
                              {random_tensor(r, c, rng), random_tensor(r, c, rng)});
          }};
}

inline GradientCase row_op(std::string name, Binary f) {
  return {std::move(name), [f](std::mt19937_64& rng) {
            const std::size_t r = draw(rng, 1, 4), c = draw(rng, 1, 5);
            return grad_check([f](Graph&, std::vector<Var>& v) { return f(v[0], v[1]); },
                              {random_tensor(r, c, rng), random_tensor(1, c, rng)});
          }};
}

inline std::vector<GradientCase> op_cases() {
  std::vector<GradientCase> cases;
  cases.push_back(binary("add", [](Var a, Var b) { return ad::add(a, b); }));
  cases.push_back(binary("sub", [](Var a, Var b) { return ad::sub(a, b); }));
  cases.push_back(binary("mul", [](Var a, Var b) { return ad::mul(a, b); }));
  cases.push_back({"scale", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 4), c = draw(rng, 1, 5);
                     const double factor = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
                     return grad_check([factor](Graph&, std::vector<Var>& v) { return ad::scale(v[0], factor); },
                                       {random_tensor(r, c, rng)});
                   }});
  cases.push_back(row_op("add_row", [](Var a, Var b) { return ad::add_row(a, b); }));
  cases.push_back(row_op("mul_row", [](Var a, Var b) { return ad::mul_row(a, b); }));
  cases.push_back({"matmul", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 4), k = draw(rng, 1, 4), c = draw(rng, 1, 5);
                     return grad_check([](Graph&, std::vector<Var>& v) { return ad::matmul(v[0], v[1]); },
                                       {random_tensor(r, k, rng), random_tensor(k, c, rng)});
                   }});
  cases.push_back({"matmul_nt", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 4), k = draw(rng, 1, 4), c = draw(rng, 1, 5);
                     return grad_check([](Graph&, std::vector<Var>& v) { return ad::matmul_nt(v[0], v[1]); },
                                       {random_tensor(r, k, rng), random_tensor(c, k, rng)});
                   }});
  cases.push_back(unary("transpose", [](Var a) { return ad::transpose(a); }));
  cases.push_back(unary("tanh", [](Var a) { return ad::tanh(a); }, -2.0, 2.0));
  cases.push_back(unary("sigmoid", [](Var a) { return ad::sigmoid(a); }, -4.0, 4.0));
  cases.push_back(unary("relu", [](Var a) { return ad::relu(a); }));
  cases.push_back(unary("softmax_rows", [](Var a) { return ad::softmax_rows(a); }, -3.0, 3.0));
  cases.push_back(unary("log_softmax_rows", [](Var a) { return ad::log_softmax_rows(a); }, -3.0, 3.0));
  // With two columns every normalized entry is +-1 up to the epsilon term, so
  // the true gradient is O(eps / variance) and sits below finite-difference
  // resolution. Width 2 is therefore checked with a large epsilon, where the
  // gradient is well conditioned, and the default epsilon from width 3 on.
  cases.push_back(unary("normalize_rows", [](Var a) { return ad::normalize_rows(a); }, -1.0, 1.0, 3));
  cases.push_back(unary("normalize_rows(eps=0.1)", [](Var a) { return ad::normalize_rows(a, 0.1); }, -1.0, 1.0, 2));
  cases.push_back(unary("sum", [](Var a) { return ad::sum(a); }));
  cases.push_back(unary("mean", [](Var a) { return ad::mean(a); }));
  cases.push_back({"dropout", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 4), c = draw(rng, 1, 5);
                     const std::uint64_t seed = rng();
                     return grad_check([](Graph&, std::vector<Var>& v) { return ad::dropout(v[0], 0.3); },
                                       {random_tensor(r, c, rng)}, seed, 1e-5, /*training=*/true);
                   }});
  cases.push_back({"concat_cols", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 4);
                     return grad_check(
                         [](Graph&, std::vector<Var>& v) { return ad::concat_cols(std::vector<Var>{v[0], v[1], v[0]}); },
                         {random_tensor(r, draw(rng, 1, 3), rng), random_tensor(r, draw(rng, 1, 3), rng)});
                   }});
  cases.push_back({"concat_rows", [](std::mt19937_64& rng) {
                     const std::size_t c = draw(rng, 1, 5);
                     return grad_check(
                         [](Graph&, std::vector<Var>& v) { return ad::concat_rows(std::vector<Var>{v[0], v[1]}); },
                         {random_tensor(draw(rng, 1, 3), c, rng), random_tensor(draw(rng, 1, 3), c, rng)});
                   }});
  cases.push_back({"slice_rows", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 5), c = draw(rng, 1, 4);
                     const std::size_t begin = draw(rng, 0, r - 1), count = draw(rng, 1, r - begin);
                     return grad_check(
                         [begin, count](Graph&, std::vector<Var>& v) { return ad::slice_rows(v[0], begin, count); },
                         {random_tensor(r, c, rng)});
                   }});
  cases.push_back({"slice_cols", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 4), c = draw(rng, 1, 5);
                     const std::size_t begin = draw(rng, 0, c - 1), count = draw(rng, 1, c - begin);
                     return grad_check(
                         [begin, count](Graph&, std::vector<Var>& v) { return ad::slice_cols(v[0], begin, count); },
                         {random_tensor(r, c, rng)});
                   }});
  cases.push_back({"gather_rows", [](std::mt19937_64& rng) {
                     const std::size_t rows = draw(rng, 1, 4), c = draw(rng, 1, 4);
                     const std::vector<int> ids = random_ids(rng, draw(rng, 1, 5), rows);
                     return grad_check([ids](Graph&, std::vector<Var>& v) { return ad::gather_rows(v[0], ids); },
                                       {random_tensor(rows, c, rng)});
                   }});
  cases.push_back({"mask_fill", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 4), c = draw(rng, 1, 5);
                     const Tensor mask = random_mask(rng, r, c);
                     return grad_check([mask](Graph&, std::vector<Var>& v) { return ad::mask_fill(v[0], mask, -5.0); },
                                       {random_tensor(r, c, rng)});
                   }});
  using Segment = Var (*)(Var, std::span<const int>, std::size_t);
  const std::pair<const char*, Segment> segments[] = {
      {"segment_sum_cols", &ad::segment_sum_cols},
      {"segment_max_cols", &ad::segment_max_cols},
      {"segment_logsumexp_cols", &ad::segment_logsumexp_cols}};
  for (const auto& [name, f] : segments) {
    cases.push_back({name, [f](std::mt19937_64& rng) {
                       const std::size_t r = draw(rng, 1, 4), c = draw(rng, 1, 6);
                       const std::size_t groups = draw(rng, 1, c);
                       const std::vector<int> g = random_groups(rng, c, groups);
                       return grad_check([f, g, groups](Graph&, std::vector<Var>& v) { return f(v[0], g, groups); },
                                         {random_tensor(r, c, rng, -2.0, 2.0)});
                     }});
  }
  cases.push_back({"pick", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 4), c = draw(rng, 1, 5);
                     const std::vector<int> idx = random_ids(rng, r, c);
                     return grad_check([idx](Graph&, std::vector<Var>& v) { return ad::pick(v[0], idx); },
                                       {random_tensor(r, c, rng)});
                   }});
  return cases;
}

inline std::vector<GradientCase> layer_cases() {
  std::vector<GradientCase> cases;
  cases.push_back({"cross_entropy", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 4), c = draw(rng, 2, 5);
                     std::vector<int> targets = random_ids(rng, r, c);
                     targets[rng() % r] = 1;  // at least one scored row
                     return grad_check(
                         [targets](Graph&, std::vector<Var>& v) { return ad::cross_entropy(v[0], targets, 0); },
                         {random_tensor(r, c, rng, -2.0, 2.0)});
                   }});
  cases.push_back({"nll_sum", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 4), c = draw(rng, 2, 5);
                     std::vector<int> targets = random_ids(rng, r, c);
                     targets[rng() % r] = 1;
                     return grad_check(
                         [targets](Graph&, std::vector<Var>& v) {
                           return ad::nll_sum(ad::log_softmax_rows(v[0]), targets, 0);
                         },
                         {random_tensor(r, c, rng, -2.0, 2.0)});
                   }});
  cases.push_back({"lstm_step", [](std::mt19937_64& rng) {
                     const std::size_t in = draw(rng, 1, 4), h = draw(rng, 1, 3);
                     return grad_check(
                         [](Graph&, std::vector<Var>& v) {
                           ad::LstmState s = ad::lstm_step(v[0], {v[1], v[2]}, v[3], v[4], v[5]);
                           return ad::concat_cols(std::vector<Var>{s.h, s.c});
                         },
                         {random_tensor(1, in, rng), random_tensor(1, h, rng), random_tensor(1, h, rng),
                          random_tensor(in, 4 * h, rng), random_tensor(h, 4 * h, rng), random_tensor(1, 4 * h, rng)});
                   }});
  cases.push_back({"global_attention", [](std::mt19937_64& rng) {
                     const std::size_t q = draw(rng, 1, 3), k = draw(rng, 1, 5), d = draw(rng, 1, 4),
                                       dv = draw(rng, 1, 4);
                     const Tensor mask = random_mask(rng, q, k);
                     const double s = std::uniform_real_distribution<double>(0.3, 1.5)(rng);
                     return grad_check(
                         [mask, s](Graph&, std::vector<Var>& v) {
                           return ad::global_attention(v[0], v[1], v[2], &mask, s).context;
                         },
                         {random_tensor(q, d, rng), random_tensor(k, d, rng), random_tensor(k, dv, rng)});
                   }});
  cases.push_back({"Linear", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 4), in = draw(rng, 1, 4), out = draw(rng, 1, 4);
                     ParameterStore store;
                     ad::Linear layer(store, "linear", in, out, rng, rng() % 2 == 0);
                     for (auto& p : store) p->value = random_tensor(p->value.rows(), p->value.cols(), rng);
                     return grad_check_params([&](Graph&, std::vector<Var>& v) { return layer(v[0]); },
                                              {random_tensor(r, in, rng)}, store);
                   }});
  cases.push_back({"Embedding", [](std::mt19937_64& rng) {
                     const std::size_t vocab = draw(rng, 1, 5), dim = draw(rng, 1, 4);
                     ParameterStore store;
                     ad::Embedding layer(store, "embed", vocab, dim, rng);
                     const std::vector<int> ids = random_ids(rng, draw(rng, 1, 5), vocab);
                     return grad_check_params([&](Graph& g, std::vector<Var>&) { return layer(g, ids); }, {}, store);
                   }});
  cases.push_back({"LstmCell", [](std::mt19937_64& rng) {
                     const std::size_t in = draw(rng, 1, 4), h = draw(rng, 1, 3);
                     ParameterStore store;
                     ad::LstmCell cell(store, "lstm", in, h, rng);
                     for (auto& p : store) p->value = random_tensor(p->value.rows(), p->value.cols(), rng);
                     const std::size_t steps = draw(rng, 1, 3);
                     return grad_check_params(
                         [&](Graph& g, std::vector<Var>& v) {
                           ad::LstmState s = cell.zero_state(g);
                           for (std::size_t t = 0; t < steps; ++t) s = cell.step(ad::slice_rows(v[0], t, 1), s);
                           return ad::concat_cols(std::vector<Var>{s.h, s.c});
                         },
                         {random_tensor(steps, in, rng)}, store);
                   }});
  cases.push_back({"BilinearAttention", [](std::mt19937_64& rng) {
                     const std::size_t q = draw(rng, 1, 3), k = draw(rng, 1, 4), dq = draw(rng, 1, 4),
                                       dk = draw(rng, 1, 4);
                     ParameterStore store;
                     ad::BilinearAttention attn(store, "attn", dq, dk, rng);
                     const Tensor mask = random_mask(rng, q, k);
                     return grad_check_params(
                         [&](Graph&, std::vector<Var>& v) { return attn(v[0], v[1], v[1], &mask).context; },
                         {random_tensor(q, dq, rng), random_tensor(k, dk, rng)}, store);
                   }});
  cases.push_back({"LayerNorm", [](std::mt19937_64& rng) {
                     // Width 3 and up: see normalize_rows above.
                     const std::size_t r = draw(rng, 1, 4), d = draw(rng, 3, 5);
                     ParameterStore store;
                     ad::LayerNorm norm(store, "norm", d);
                     for (auto& p : store) p->value = random_tensor(1, d, rng);
                     return grad_check_params([&](Graph&, std::vector<Var>& v) { return norm(v[0]); },
                                              {random_tensor(r, d, rng)}, store);
                   }});
  cases.push_back({"MultiHeadAttention", [](std::mt19937_64& rng) {
                     const std::size_t heads = draw(rng, 1, 2), d = heads * draw(rng, 1, 2);
                     const std::size_t q = draw(rng, 1, 3), k = draw(rng, 1, 4);
                     ParameterStore store;
                     ad::MultiHeadAttention mha(store, "mha", d, heads, rng);
                     const Tensor mask = random_mask(rng, q, k);
                     return grad_check_params(
                         [&](Graph&, std::vector<Var>& v) { return mha(v[0], v[1], &mask, 0.0).output; },
                         {random_tensor(q, d, rng), random_tensor(k, d, rng)}, store);
                   }});
  cases.push_back({"FeedForward", [](std::mt19937_64& rng) {
                     const std::size_t r = draw(rng, 1, 3), d = draw(rng, 1, 4), hidden = draw(rng, 1, 5);
                     ParameterStore store;
                     ad::FeedForward ffn(store, "ffn", d, hidden, rng);
                     for (auto& p : store) p->value = random_tensor(p->value.rows(), p->value.cols(), rng);
                     return grad_check_params([&](Graph&, std::vector<Var>& v) { return ffn(v[0], 0.0); },
                                              {random_tensor(r, d, rng)}, store);
                   }});
  for (auto agg : {models::CopyAggregation::kSum, models::CopyAggregation::kMax}) {
    const std::string name = agg == models::CopyAggregation::kSum ? "copy_log_probs(sum)" : "copy_log_probs(max)";
    cases.push_back({name, [agg](std::mt19937_64& rng) {
                       const std::size_t r = draw(rng, 1, 3), base = draw(rng, 2, 6), n = draw(rng, 1, 5);
                       const models::ExtendedSource src = models::extend_ids(random_extended(rng, n, base), base);
                       return grad_check(
                           [&src, agg](Graph&, std::vector<Var>& v) { return models::copy_log_probs(v[0], v[1], src, agg); },
                           {random_tensor(r, base, rng, -2.0, 2.0), random_tensor(r, n, rng, -2.0, 2.0)});
                     }});
  }
  for (auto mode : {models::Combine::kParallel, models::Combine::kSerial}) {
    const std::string name = std::string("MultiSourceAttention(") + std::string(models::combine_name(mode)) + ")";
    cases.push_back({name, [mode](std::mt19937_64& rng) {
                       const std::size_t heads = draw(rng, 1, 2), d = 2 * heads;
                       const std::size_t q = draw(rng, 1, 3), k1 = draw(rng, 1, 4), k2 = draw(rng, 1, 3);
                       ParameterStore store;
                       models::MultiSourceAttention ms(store, "ms", d, heads, mode, rng);
                       return grad_check_params(
                           [&](Graph&, std::vector<Var>& v) { return ms(v[0], v[1], v[2], 0.0).output; },
                           {random_tensor(q, d, rng), random_tensor(k1, d, rng), random_tensor(k2, d, rng)}, store);
                     }});
  }
  return cases;
}

}  // namespace gradient_detail

/// Every op and layer, one randomized instance per call of `run`.
inline std::vector<GradientCase> gradient_cases() {
  auto cases = gradient_detail::op_cases();
  auto layers = gradient_detail::layer_cases();
  cases.insert(cases.end(), layers.begin(), layers.end());
  return cases;
}

/// End-to-end loss of a small model of `family`, checked over every
/// parameter. Source and target lengths vary with `rng`.
inline GradCheckResult model_gradient_check(models::Family family, std::mt19937_64& rng) {
  using gradient_detail::draw;
  const std::size_t vocab = 9;
  models::ModelConfig c = toy_config(family, vocab);
  c.d_model = 4;
  c.d_ffn = 6;
  c.heads = 2;
  c.enc_layers = c.dec_layers = 1;
  auto model = models::build_model(c, rng());
  const std::size_t n = draw(rng, 1, 4);
  const std::vector<int> source = models::uses_copy(family)
                                      ? gradient_detail::random_extended(rng, n, vocab)
                                      : gradient_detail::random_ids(rng, n, vocab);
  std::optional<std::vector<int>> second;
  if (family == models::Family::kMultiSourceTransformer)
    second = gradient_detail::random_ids(rng, draw(rng, 1, 3), vocab);
  const models::SourceInput src = models::source_from_ids(source, vocab, second);
  std::vector<int> target;
  for (std::size_t t = draw(rng, 1, 3); t > 0; --t) target.push_back(static_cast<int>(draw(rng, 4, vocab - 1)));
  if (models::uses_copy(family) && source.back() >= static_cast<int>(vocab)) target.push_back(source.back());
  target.push_back(data::Vocab::kEos);
  return grad_check_params([&](Graph& g, std::vector<Var>&) { return model->loss(g, src, target); }, {},
                           model->params());
}

}  // namespace laqg::testing
