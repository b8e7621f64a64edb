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

#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "gradcheck.hpp"
#include "laqg/autodiff/adam.hpp"
#include "laqg/autodiff/checkpoint.hpp"
#include "laqg/autodiff/layers.hpp"
#include "laqg/error.hpp"

using namespace laqg;
using namespace laqg::ad;
using laqg::testing::grad_check;
using laqg::testing::random_tensor;

namespace {

void check_close(const Tensor& t, const Tensor& expected, double tol = 1e-12) {
  REQUIRE(t.size() == expected.size());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == doctest::Approx(expected[i]).epsilon(tol));
}

}  // namespace

TEST_CASE("matmul") {
  Graph g;
  SUBCASE("identity") {
    Var eye = g.constant(Tensor::matrix({{1, 0}, {0, 1}}));
    Var m = g.constant(Tensor::matrix({{1, 2}, {3, 4}}));
    CHECK(matmul(eye, m).value() == Tensor::matrix({{1, 2}, {3, 4}}));
  }
  SUBCASE("hand product") {
    Var a = g.constant(Tensor::matrix({{1, 2}, {3, 4}}));
    Var b = g.constant(Tensor::matrix({{5}, {6}}));
    CHECK(matmul(a, b).value() == Tensor::matrix({{17}, {39}}));
  }
  SUBCASE("shape mismatch names both shapes") {
    Var a = g.constant(Tensor::matrix(2, 3));
    Var b = g.constant(Tensor::matrix(2, 3));
    try {
      matmul(a, b);
      FAIL("expected a dimension error");
    } catch (const DimensionError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("[2x3] x [2x3]") != std::string::npos);
    }
  }
}

TEST_CASE("softmax") {
  Graph g;
  check_close(softmax_rows(g.constant(Tensor::row({0, 0, 0}))).value(),
              Tensor::row({1.0 / 3, 1.0 / 3, 1.0 / 3}));
  check_close(softmax_rows(g.constant(Tensor::row({0, std::log(2.0)}))).value(),
              Tensor::row({1.0 / 3, 2.0 / 3}));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor x = random_tensor(3, 7, rng, -20, 20);
    Tensor shifted = x;
    for (auto& v : shifted.data()) v += 123.5;
    Tensor a = softmax_rows(g.constant(x)).value();
    Tensor b = softmax_rows(g.constant(shifted)).value();
    for (std::size_t r = 0; r < 3; ++r) {
      double s = 0;
      for (double v : a.row_span(r)) {
        CHECK(v >= 0.0);
        s += v;
      }
      CHECK(std::abs(s - 1.0) < 1e-9);
    }
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
  }
}

TEST_CASE("backward") {
  SUBCASE("sum of squares") {
    Graph g;
    Var w = g.input(Tensor::row({1, 2}));
    g.backward(sum(mul(w, w)));
    CHECK(w.grad() == Tensor::row({2, 4}));
  }
  SUBCASE("loss independent of w") {
    ParameterStore store;
    Parameter& w = store.add("w", Tensor::row({1, 2}));
    Graph g;
    g.param(w);
    Var c = g.input(Tensor::row({3}));
    g.backward(sum(c));
    CHECK(w.grad == Tensor::row({0, 0}));
  }
  SUBCASE("non-scalar loss") {
    Graph g;
    Var w = g.input(Tensor::row({1, 2}));
    CHECK_THROWS_AS(g.backward(w), ContractError);
  }
  SUBCASE("fan-out accumulates") {
    Graph g;
    Var w = g.input(Tensor::row({3}));
    Var y = add(mul(w, w), scale(w, 5.0));
    g.backward(sum(y));
    CHECK(w.grad()[0] == doctest::Approx(11.0));
  }
}

TEST_CASE("finite-difference checks for every op") {
  std::mt19937_64 rng(11);
  auto within = [](const laqg::testing::GradCheckResult& r) {
    CHECK(r.checked > 0);
    CHECK(r.max_rel_error < 1e-4);
  };
  within(grad_check([](Graph&, std::vector<Var>& v) { return matmul(v[0], v[1]); },
                    {random_tensor(3, 4, rng), random_tensor(4, 2, rng)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return matmul_nt(v[0], v[1]); },
                    {random_tensor(3, 4, rng), random_tensor(5, 4, rng)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return transpose(v[0]); },
                    {random_tensor(3, 4, rng)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return sub(mul(v[0], v[1]), v[0]); },
                    {random_tensor(2, 3, rng), random_tensor(2, 3, rng)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return mul_row(add_row(v[0], v[1]), v[2]); },
                    {random_tensor(4, 3, rng), random_tensor(1, 3, rng), random_tensor(1, 3, rng)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return tanh(v[0]); }, {random_tensor(2, 5, rng)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return sigmoid(v[0]); }, {random_tensor(2, 5, rng, -4, 4)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return relu(v[0]); }, {random_tensor(2, 5, rng)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return softmax_rows(v[0]); }, {random_tensor(3, 6, rng, -3, 3)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return log_softmax_rows(v[0]); }, {random_tensor(3, 6, rng, -3, 3)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return normalize_rows(v[0]); }, {random_tensor(3, 6, rng)}));
  within(grad_check(
      [](Graph&, std::vector<Var>& v) {
        std::vector<Var> parts{v[0], v[1]};
        return concat_rows(std::vector<Var>{concat_cols(parts), concat_cols(parts)});
      },
      {random_tensor(2, 3, rng), random_tensor(2, 2, rng)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return slice_cols(slice_rows(v[0], 1, 2), 1, 3); },
                    {random_tensor(4, 5, rng)}));
  within(grad_check(
      [](Graph&, std::vector<Var>& v) {
        const int ids[] = {2, 0, 2, 1};
        return gather_rows(v[0], ids);
      },
      {random_tensor(3, 4, rng)}));
  within(grad_check(
      [](Graph&, std::vector<Var>& v) {
        const int groups[] = {0, 1, 0, 2, 1};
        return concat_cols(std::vector<Var>{segment_sum_cols(v[0], groups, 3),
                                            segment_max_cols(v[0], groups, 3),
                                            segment_logsumexp_cols(v[0], groups, 3)});
      },
      {random_tensor(3, 5, rng)}));
  within(grad_check(
      [](Graph&, std::vector<Var>& v) {
        Tensor m = Tensor::row({0, 1, 0, 0});
        return mask_fill(v[0], m, -5.0);
      },
      {random_tensor(1, 4, rng)}));
  within(grad_check(
      [](Graph&, std::vector<Var>& v) {
        const int idx[] = {1, 3, 0};
        return pick(log_softmax_rows(v[0]), idx);
      },
      {random_tensor(3, 4, rng)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return mean(mul(v[0], v[0])); }, {random_tensor(2, 3, rng)}));
  within(grad_check([](Graph&, std::vector<Var>& v) { return dropout(v[0], 0.3); },
                    {random_tensor(3, 4, rng)}, 5, 1e-5, /*training=*/true));
}

TEST_CASE("adam") {
  SUBCASE("first step with unit gradient") {
    AdamState state;
    Tensor p = Tensor::row({0.0});
    Tensor g = Tensor::row({1.0});
    Tensor* ps[] = {&p};
    const Tensor* gs[] = {&g};
    adam_step(ps, gs, state);
    CHECK(state.t == 1);
    CHECK(p[0] == doctest::Approx(-0.0005).epsilon(1e-6));
  }
  SUBCASE("zero gradient leaves parameters unchanged") {
    ParameterStore store;
    store.add("w", Tensor::row({1.5, -2.0}));
    Adam adam;
    for (int i = 0; i < 3; ++i) adam.step(store);
    CHECK(store.at("w").value == Tensor::row({1.5, -2.0}));
    CHECK(adam.steps() == 3);
  }
  SUBCASE("two steps follow the moment recurrence") {
    AdamState state;
    state.config.lr = 0.01;
    Tensor p = Tensor::row({1.0});
    Tensor g = Tensor::row({0.5});
    Tensor* ps[] = {&p};
    const Tensor* gs[] = {&g};
    adam_step(ps, gs, state);
    adam_step(ps, gs, state);
    // m1 = 0.05, m2 = 0.095; v1 = 0.005, v2 = 0.0099 (beta2 = 0.98).
    // Constant gradients make m_hat / sqrt(v_hat) = 1, so each step moves lr.
    CHECK(state.m[0][0] == doctest::Approx(0.095));
    CHECK(state.v[0][0] == doctest::Approx(0.0099));
    const double step1 = 0.01 * (0.05 / 0.1) / (std::sqrt(0.005 / 0.02) + 1e-8);
    const double step2 = 0.01 * (0.095 / 0.19) / (std::sqrt(0.0099 / (1 - 0.98 * 0.98)) + 1e-8);
    CHECK(p[0] == doctest::Approx(1.0 - step1 - step2).epsilon(1e-12));
    CHECK(p[0] == doctest::Approx(0.98).epsilon(1e-9));
  }
  SUBCASE("shape mismatch") {
    AdamState state;
    Tensor p = Tensor::row({1.0, 2.0});
    Tensor g = Tensor::row({1.0});
    Tensor* ps[] = {&p};
    const Tensor* gs[] = {&g};
    CHECK_THROWS_AS(adam_step(ps, gs, state), DimensionError);
  }
}

TEST_CASE("lstm_step") {
  Graph g;
  const std::size_t h = 3;
  Var wi = g.constant(Tensor::matrix(2, 4 * h));
  Var wh = g.constant(Tensor::matrix(h, 4 * h));
  Var b = g.constant(Tensor::matrix(1, 4 * h));
  Var x = g.constant(Tensor::row({0.7, -0.2}));
  SUBCASE("zero weights and zero cell") {
    LstmState s = lstm_step(x, {g.constant(Tensor::matrix(1, h)), g.constant(Tensor::matrix(1, h))}, wi, wh, b);
    CHECK(s.h.value() == Tensor::matrix(1, h));
    CHECK(s.c.value() == Tensor::matrix(1, h));
  }
  SUBCASE("zero weights halve the cell") {
    Tensor c0 = Tensor::row({1.0, -2.0, 0.4});
    LstmState s = lstm_step(x, {g.constant(Tensor::matrix(1, h)), g.constant(c0)}, wi, wh, b);
    for (std::size_t i = 0; i < h; ++i) {
      CHECK(s.c.value()[i] == doctest::Approx(c0[i] / 2));
      CHECK(s.h.value()[i] == doctest::Approx(0.5 * std::tanh(c0[i] / 2)));
    }
  }
  SUBCASE("gradient check") {
    std::mt19937_64 rng(5);
    auto r = grad_check(
        [](Graph&, std::vector<Var>& v) {
          LstmState s = lstm_step(v[0], {v[1], v[2]}, v[3], v[4], v[5]);
          return concat_cols(std::vector<Var>{s.h, s.c});
        },
        {random_tensor(1, 2, rng), random_tensor(1, h, rng), random_tensor(1, h, rng),
         random_tensor(2, 4 * h, rng), random_tensor(h, 4 * h, rng), random_tensor(1, 4 * h, rng)});
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("global_attention") {
  Graph g;
  Var keys = g.constant(Tensor::matrix({{1, 0}, {0, 1}}));
  Var values = g.constant(Tensor::matrix({{10, 0}, {0, 10}}));
  SUBCASE("dot scoring") {
    auto a = global_attention(g.constant(Tensor::row({1, 0})), keys, values);
    const double e = std::exp(1.0);
    CHECK(a.weights.value()[0] == doctest::Approx(e / (e + 1)));
    CHECK(a.weights.value()[1] == doctest::Approx(1 / (e + 1)));
    CHECK(a.weights.value()[0] == doctest::Approx(0.731).epsilon(1e-3));
  }
  SUBCASE("single unmasked position") {
    Tensor mask = Tensor::row({1, 0});
    auto a = global_attention(g.constant(Tensor::row({5, 0})), keys, values, &mask);
    CHECK(a.weights.value() == Tensor::row({0, 1}));
    CHECK(a.context.value() == Tensor::row({0, 10}));
  }
  SUBCASE("all masked") {
    Tensor mask = Tensor::row({1, 1});
    CHECK_THROWS_AS(global_attention(g.constant(Tensor::row({1, 0})), keys, values, &mask), ContractError);
  }
}

TEST_CASE("multi-head attention") {
  std::mt19937_64 rng(9);
  ParameterStore store;
  SUBCASE("indivisible heads") {
    CHECK_THROWS_AS(MultiHeadAttention(store, "mha", 10, 4, rng), ConfigError);
  }
  SUBCASE("one head with identity projections is scaled dot-product attention") {
    MultiHeadAttention mha(store, "mha", 4, 1, rng);
    for (Linear* l : {&mha.q_proj(), &mha.k_proj(), &mha.v_proj(), &mha.out_proj()}) {
      l->weight().value.fill(0.0);
      for (std::size_t i = 0; i < 4; ++i) l->weight().value(i, i) = 1.0;
    }
    Graph g;
    Tensor q = random_tensor(2, 4, rng), m = random_tensor(3, 4, rng);
    Var out = mha(g.constant(q), g.constant(m), nullptr, 0.0).output;
    Var ref = global_attention(g.constant(q), g.constant(m), g.constant(m), nullptr, 0.5).context;
    check_close(out.value(), ref.value(), 1e-12);
  }
  SUBCASE("output shape follows the query") {
    for (std::size_t heads : {1u, 2u, 4u}) {
      ParameterStore s;
      MultiHeadAttention mha(s, "mha", 8, heads, rng);
      Graph g;
      Var out = mha(g.constant(random_tensor(3, 8, rng)), g.constant(random_tensor(5, 8, rng)), nullptr, 0.0).output;
      CHECK(out.rows() == 3);
      CHECK(out.cols() == 8);
    }
  }
  SUBCASE("gradient check with causal mask") {
    MultiHeadAttention mha(store, "mha", 4, 2, rng);
    Tensor mask = causal_mask(3);
    auto r = grad_check(
        [&](Graph&, std::vector<Var>& v) {
          auto out = mha(v[0], v[0], &mask, 0.0, true);
          return concat_cols(std::vector<Var>{out.output, *out.mean_scores});
        },
        {random_tensor(3, 4, rng)});
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("positional encoding") {
  Tensor pe = positional_encoding(64, 16);
  for (std::size_t c = 0; c < 16; ++c) CHECK(pe(0, c) == (c % 2 == 0 ? 0.0 : 1.0));
  CHECK(pe(1, 0) == doctest::Approx(0.84147).epsilon(1e-5));
  for (double v : pe.data()) CHECK((v >= -1.0 && v <= 1.0));
  for (std::size_t a = 0; a < 64; ++a)
    for (std::size_t b = a + 1; b < 64; ++b) {
      bool differ = false;
      for (std::size_t c = 0; c < 16 && !differ; ++c) differ = pe(a, c) != pe(b, c);
      CHECK(differ);
    }
  CHECK_THROWS_AS(positional_encoding(4, 7), ConfigError);
}

TEST_CASE("cross entropy") {
  Graph g;
  const int targets[] = {3, 1};
  CHECK(cross_entropy(g.constant(Tensor::matrix(2, 7)), targets, -1).value().item() ==
        doctest::Approx(std::log(7.0)));
  Tensor peaked = Tensor::matrix(2, 7);
  peaked(0, 3) = 30;
  peaked(1, 1) = 30;
  CHECK(cross_entropy(g.constant(peaked), targets, -1).value().item() < 1e-9);
  const int pads[] = {0, 0};
  CHECK_THROWS_AS(cross_entropy(g.constant(peaked), pads, 0), ContractError);
  const int bad[] = {9, 1};
  CHECK_THROWS_AS(cross_entropy(g.constant(peaked), bad, 0), DataError);
}

TEST_CASE("layer norm and dropout") {
  std::mt19937_64 rng(1);
  Graph g;
  Tensor x = random_tensor(5, 16, rng, -3, 3);
  Tensor y = normalize_rows(g.constant(x)).value();
  for (std::size_t r = 0; r < 5; ++r) {
    double m = 0, v = 0;
    for (double e : y.row_span(r)) m += e;
    m /= 16;
    for (double e : y.row_span(r)) v += (e - m) * (e - m);
    v /= 16;
    CHECK(std::abs(m) < 1e-6);
    CHECK(std::abs(v - 1.0) < 1e-6);
  }
  Graph train(true, 4);
  Var in = train.constant(x);
  CHECK(dropout(in, 0.0).value() == x);
  Graph eval(false);
  CHECK(dropout(eval.constant(x), 0.5).value() == x);
}

TEST_CASE("checkpoint round trip") {
  std::mt19937_64 rng(2);
  ParameterStore a;
  a.add("x.weight", random_tensor(3, 2, rng));
  a.add("x.bias", random_tensor(1, 2, rng));
  const auto path = std::filesystem::temp_directory_path() / "laqg_ckpt_test.bin";
  save_checkpoint(path, R"({"family":"toy"})", a);
  Checkpoint c = read_checkpoint(path);
  CHECK(c.header_json == R"({"family":"toy"})");
  ParameterStore b;
  b.add("x.weight", Tensor::matrix(3, 2));
  b.add("x.bias", Tensor::matrix(1, 2));
  load_parameters(c, b);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(b.at("x.weight").value[i] == doctest::Approx(a.at("x.weight").value[i]).epsilon(1e-6));
  ParameterStore wrong;
  wrong.add("x.weight", Tensor::matrix(2, 3));
  wrong.add("x.bias", Tensor::matrix(1, 2));
  CHECK_THROWS_AS(load_parameters(c, wrong), DataError);
  std::filesystem::remove(path);
}
