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
#include <functional>
#include <map>
#include <random>

#include "doctest.h"
#include "laqg/data/vocab.hpp"
#include "laqg/decoding/search.hpp"
#include "laqg/error.hpp"
#include "step_models.hpp"
#include "toy.hpp"

using namespace laqg;
using namespace laqg::decoding;
using data::Vocab;

using testing::counterexample_model;
using testing::enumerate_best;
using testing::log_softmax;
using testing::PrefixModel;
using testing::random_model;

TEST_CASE("greedy examples") {
  SUBCASE("EOS forced at the first step") {
    PrefixModel m([](const std::vector<int>&) {
      std::vector<double> logits(8, 0.0);
      logits[Vocab::kEos] = 30.0;
      return log_softmax(logits);
    });
    Hypothesis h = greedy_decode(m, 10);
    CHECK(h.tokens.empty());
    CHECK(h.finished);
  }
  SUBCASE("ties go to the lowest id") {
    PrefixModel m([](const std::vector<int>& prefix) {
      std::vector<double> logits(8, 0.0);
      logits[5] = logits[6] = 3.0;
      if (prefix.size() > 1) logits[Vocab::kEos] = 9.0;
      return log_softmax(logits);
    });
    CHECK(greedy_decode(m, 10).tokens == std::vector<int>{5});
  }
  SUBCASE("PAD and BOS are never emitted; the cap stops decoding") {
    PrefixModel m([](const std::vector<int>&) {
      std::vector<double> logits(6, 0.0);
      logits[Vocab::kPad] = 50.0;
      logits[Vocab::kBos] = 40.0;
      logits[4] = 1.0;
      return log_softmax(logits);
    });
    Hypothesis h = greedy_decode(m, 3);
    CHECK(h.tokens == std::vector<int>{4, 4, 4});
    CHECK_FALSE(h.finished);
  }
}

TEST_CASE("beam width 1 equals greedy") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    PrefixModel a = random_model(seed, 7);
    PrefixModel b = random_model(seed, 7);
    const Hypothesis g = greedy_decode(a, 6);
    const Hypothesis beam = beam_search(b, 1, 0.0, 6);
    CHECK(beam.tokens == g.tokens);
    CHECK(beam.log_prob == g.log_prob);
    CHECK(beam.finished == g.finished);
  }
}

TEST_CASE("beam width 2 beats greedy on the counterexample fixture") {
  PrefixModel m = counterexample_model();
  const Hypothesis greedy = greedy_decode(m, 5);
  const Hypothesis beam = beam_search(m, 2, 0.0, 5);
  const Hypothesis best = enumerate_best(m, 7, 3);
  CHECK(greedy.tokens == std::vector<int>{4, 4, 4});
  CHECK(greedy.log_prob == doctest::Approx(std::log(0.5 * 0.35 * 0.8)));
  CHECK(best.tokens == std::vector<int>{5, 4, 4});
  CHECK(best.log_prob == doctest::Approx(std::log(0.4 * 0.9 * 0.8)));
  CHECK(beam.tokens == best.tokens);
  CHECK(beam.log_prob == doctest::Approx(best.log_prob).epsilon(1e-12));
  CHECK(beam.log_prob > greedy.log_prob);
}

TEST_CASE("wide beams reach the enumeration optimum") {
  // A beam at least as wide as the number of live prefixes never prunes,
  // so it must return the exact argmax.
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    PrefixModel m = random_model(seed + 500, 6);
    const Hypothesis best = enumerate_best(m, 6, 4);
    const Hypothesis beam = beam_search(m, 3 * 3 * 3 * 3 * 3, 0.0, 4);
    CHECK(beam.log_prob == doctest::Approx(best.log_prob).epsilon(1e-12));
    CHECK(beam.tokens == best.tokens);
  }
}

TEST_CASE("beam search is not monotone in width") {
  // Pruning can drop the prefix that leads to the best sequence, so a wider
  // beam may return a worse hypothesis than a narrower one. Here width 2
  // keeps "b a" and "b b" (0.175, 0.1715) over greedy's "a a" (0.136),
  // whose continuation is far likelier.
  const double impossible = -1e9;
  std::map<std::vector<int>, std::vector<double>> table = {
      {{1}, {0.40, 0.35, 0.25}},
      {{1, 4}, {0.34, 0.33, 0.33}},
      {{1, 5}, {0.50, 0.49, 0.01}},
      {{1, 4, 4}, {0.90, 0.05, 0.05}},
  };
  PrefixModel m([&](const std::vector<int>& prefix) {
    std::vector<double> lp(7, impossible);
    if (prefix.size() == 4) {
      lp[Vocab::kEos] = 0.0;
      return lp;
    }
    auto it = table.find(prefix);
    const std::vector<double> p = it != table.end() ? it->second : std::vector<double>{0.34, 0.33, 0.33};
    for (int k = 0; k < 3; ++k) lp[static_cast<std::size_t>(4 + k)] = std::log(p[static_cast<std::size_t>(k)]);
    return lp;
  });
  const Hypothesis greedy = greedy_decode(m, 5);
  const Hypothesis narrow = beam_search(m, 2, 0.0, 5);
  const Hypothesis wide = beam_search(m, 27, 0.0, 5);
  CHECK(greedy.tokens == std::vector<int>{4, 4, 4});
  CHECK(greedy.log_prob == doctest::Approx(std::log(0.4 * 0.34 * 0.9)));
  CHECK(narrow.log_prob == doctest::Approx(std::log(0.35 * 0.5 * 0.34)));
  CHECK(narrow.log_prob < greedy.log_prob);
  CHECK(wide.tokens == greedy.tokens);
}

TEST_CASE("beam outputs are well formed") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    PrefixModel m = random_model(seed + 77, 7);
    for (std::size_t width : {1u, 2u, 4u}) {
      for (double alpha : {0.0, 0.7}) {
        const Hypothesis h = beam_search(m, width, alpha, 6);
        CHECK(h.tokens.size() <= 6);
        for (int t : h.tokens) {
          CHECK(t != Vocab::kPad);
          CHECK(t != Vocab::kBos);
          CHECK(t != Vocab::kEos);
        }
        CHECK(h.log_prob == doctest::Approx(sequence_log_prob(m, h.tokens, h.finished)).epsilon(1e-12));
        const std::size_t len = h.tokens.size() + (h.finished ? 1 : 0);
        CHECK(h.score == doctest::Approx(alpha == 0.0 ? h.log_prob : h.log_prob / std::pow(len, alpha)));
      }
    }
  }
  PrefixModel m = random_model(1, 5);
  CHECK_THROWS_AS(beam_search(m, 0, 0.0, 5), ConfigError);
}

TEST_CASE("model stepper drives trained models") {
  const auto pairs = data::read_dataset(std::filesystem::path(LAQG_FIXTURES) / "toy_pairs.jsonl");
  const data::Vocab vocab = data::build_vocab(pairs, 1000);
  for (models::Family f : {models::Family::kLstmCopy, models::Family::kTransformer,
                           models::Family::kMultiSourceTransformer}) {
    CAPTURE(models::family_name(f));
    const models::ModelConfig config = testing::toy_config(f, vocab.size());
    auto model = models::build_model(config, 3);
    const models::SourceInput src = models::prepare_source(pairs[0], vocab, config);

    // The adapter reproduces a single-graph step loop.
    ModelStepper stepper(*model, src);
    const Hypothesis h = greedy_decode(stepper, 5);
    ad::Graph g;
    models::Encoded enc = model->encode(g, src);
    models::DecoderState state = model->start(g, enc);
    int prev = Vocab::kBos;
    double lp = 0.0;
    for (std::size_t t = 0; t < h.tokens.size(); ++t) {
      models::StepOutput out = model->step(g, enc, state, prev);
      const auto& row = out.log_probs.value();
      lp += row[static_cast<std::size_t>(h.tokens[t])];
      prev = h.tokens[t];
      int arg = Vocab::kEos;
      for (std::size_t c = Vocab::kEos; c < row.size(); ++c)
        if (row[c] > row[static_cast<std::size_t>(arg)]) arg = static_cast<int>(c);
      CHECK(arg == h.tokens[t]);
    }
    if (!h.finished) CHECK(h.log_prob == doctest::Approx(lp).epsilon(1e-12));

    DecodeOptions opts;
    opts.beam_width = 3;
    opts.max_len = 5;
    const Hypothesis b = decode(*model, src, opts);
    CHECK(b.tokens.size() <= 5);
  }
}

TEST_CASE("render maps extended ids to source text") {
  data::Vocab vocab(std::vector<std::string>{"what", "about", "?"});
  const std::vector<std::string> src_tokens{"the", "okapi", "runs"};
  models::SourceInput src;
  src.ids = vocab.encode(src_tokens);
  src.ext = models::extend_source(src_tokens, vocab);
  const int okapi = src.ext.target_id("okapi", vocab);
  CHECK(render({vocab.id("what"), vocab.id("about"), okapi, vocab.id("?"), Vocab::kEos}, src, vocab) ==
        "what about okapi ?");
}
