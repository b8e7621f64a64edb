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

// Central finite-difference oracle for the autodiff tests. Only forward
// evaluations are used to produce the numerical gradient.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "laqg/autodiff/graph.hpp"
#include "laqg/autodiff/ops.hpp"

namespace laqg::testing {

using ad::Graph;
using ad::Tensor;
using ad::Var;

/// Builds a differentiable output from graph inputs.
using GraphFn = std::function<Var(Graph&, std::vector<Var>&)>;

inline Tensor random_tensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                            double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Tensor t = Tensor::matrix(rows, cols);
  for (auto& v : t.data()) v = d(rng);
  return t;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

namespace detail {

/// Relative error of one gradient tensor. When both sides are below
/// `zero_floor` the gradient vanishes identically (for example a key bias,
/// which shifts every energy of a query row equally) and both sides are
/// rounding noise, so the pair counts as agreeing.
inline double relative_error(double diff_sq, double a_sq, double n_sq, double zero_floor) {
  const double scale_sum = std::sqrt(a_sq) + std::sqrt(n_sq);
  if (scale_sum < zero_floor) return 0.0;
  return std::sqrt(diff_sq) / std::max(scale_sum, 1e-10);
}

inline GradCheckResult run_grad_check(const GraphFn& fn, std::vector<Tensor> inputs,
                                      ad::ParameterStore* store, std::uint64_t seed, double h,
                                      bool training, double zero_floor) {
  std::vector<double> projection;
  auto evaluate = [&](const std::vector<Tensor>& xs, bool want_grad,
                      std::vector<Tensor>* grads) -> double {
    Graph g(training, seed + 1);
    std::vector<Var> vars;
    for (const auto& x : xs) vars.push_back(g.input(x));
    Var out = fn(g, vars);
    if (projection.empty()) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> d(-1.0, 1.0);
      projection.resize(out.value().size());
      for (auto& p : projection) p = d(rng);
    }
    Tensor w(ad::Shape{out.rows(), out.cols()}, projection);
    Var loss = ad::sum(ad::mul(out, g.constant(w)));
    if (want_grad) {
      if (store) store->zero_grad();
      g.backward(loss);
      for (const auto& v : vars) {
        grads->push_back(g.has_grad(v.id()) ? v.grad() : Tensor(v.value().shape(), 0.0));
      }
      if (store)
        for (const auto& p : *store) grads->push_back(p->grad);
    }
    return loss.value().item();
  };

  std::vector<Tensor> analytic;
  evaluate(inputs, true, &analytic);

  GradCheckResult result;
  auto check_tensor = [&](Tensor& values, const Tensor& grad) {
    double diff_sq = 0.0, a_sq = 0.0, n_sq = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double orig = values[i];
      values[i] = orig + h;
      const double fp = evaluate(inputs, false, nullptr);
      values[i] = orig - h;
      const double fm = evaluate(inputs, false, nullptr);
      values[i] = orig;
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = grad[i];
      diff_sq += (a - numeric) * (a - numeric);
      a_sq += a * a;
      n_sq += numeric * numeric;
      ++result.checked;
    }
    result.max_rel_error =
        std::max(result.max_rel_error, relative_error(diff_sq, a_sq, n_sq, zero_floor));
  };
  for (std::size_t k = 0; k < inputs.size(); ++k) check_tensor(inputs[k], analytic[k]);
  if (store) {
    std::size_t k = inputs.size();
    for (auto& p : *store) check_tensor(p->value, analytic[k++]);
  }
  return result;
}

}  // namespace detail

/// Reduces the output to a scalar with a fixed random projection, then
/// compares backward() against central differences for every input entry.
/// The error per input is ||analytic - numeric|| / max(||analytic|| + ||numeric||, 1e-10).
inline GradCheckResult grad_check(const GraphFn& fn, std::vector<Tensor> inputs,
                                  std::uint64_t seed = 7, double h = 1e-5,
                                  bool training = false) {
  return detail::run_grad_check(fn, std::move(inputs), nullptr, seed, h, training, 0.0);
}

/// Same check, extended to every parameter of `store` that `fn` reads.
/// Gradients whose analytic and numeric norms are both below 1e-8 count
/// as identically zero.
inline GradCheckResult grad_check_params(const GraphFn& fn, std::vector<Tensor> inputs,
                                         ad::ParameterStore& store, std::uint64_t seed = 7,
                                         double h = 1e-5) {
  return detail::run_grad_check(fn, std::move(inputs), &store, seed, h, false, 1e-8);
}

}  // namespace laqg::testing
