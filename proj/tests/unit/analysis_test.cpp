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

#include <map>
#include <random>
#include <set>

#include "bench_oracle.hpp"
#include "doctest.h"
#include "laqg/bench/analysis.hpp"
#include "laqg/error.hpp"

using namespace laqg;
using namespace laqg::bench;
using testing::random_results;
using testing::record;
using testing::sentence_label;
using testing::word_label;

namespace {

std::map<std::string, std::size_t> counts(const BinnedReport& r) {
  std::map<std::string, std::size_t> out;
  for (const auto& b : r.bins) out[b.label] = b.ids.size();
  return out;
}

}  // namespace

TEST_CASE("word bins partition every result set") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    auto results = random_results(rng, rng() % 40);
    BinnedReport words = bin_by_words(results, 50);
    BinnedReport sents = bin_by_sentences(results, 6);
    CHECK(words.total() == results.size());
    CHECK(sents.total() == results.size());
    std::map<std::string, std::string> word_bin, sent_bin;
    for (const auto& b : words.bins)
      for (const auto& id : b.ids) CHECK(word_bin.emplace(id, b.label).second);
    for (const auto& b : sents.bins)
      for (const auto& id : b.ids) CHECK(sent_bin.emplace(id, b.label).second);
    for (const auto& r : results) {
      CHECK(word_bin.at(r.id) == word_label(r.answer_words));
      CHECK(sent_bin.at(r.id) == sentence_label(r.answer_sentences));
    }
    if (trial % 50 == 0) {
      // Per-bin scores equal corpus metrics over exactly that bin's members.
      for (const auto& b : words.bins) {
        std::vector<data::Tokens> hyps, refs;
        for (const auto& r : results)
          if (word_label(r.answer_words) == b.label) {
            hyps.push_back(r.hypothesis);
            refs.push_back(r.reference);
          }
        if (hyps.empty()) {
          CHECK(b.report.count == 0);
          continue;
        }
        const auto expect = metrics::evaluate_corpus(hyps, refs).values();
        const auto got = b.report.values();
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("sentence bins for counts 1,1,3,7") {
  std::vector<ResultRecord> rs = {record("a", 10, 1), record("b", 10, 1), record("c", 10, 3),
                                  record("d", 10, 7)};
  BinnedReport r = bin_by_sentences(rs, 6);
  const std::map<std::string, std::size_t> expect = {{"1", 2}, {"2", 0}, {"3", 1},
                                                     {"4", 0}, {"5", 0}, {"6+", 1}};
  CHECK(counts(r) == expect);
}

TEST_CASE("word bins for 30, 70, 200 words") {
  std::vector<ResultRecord> rs = {record("a", 30, 2), record("b", 70, 3), record("c", 200, 9)};
  BinnedReport r = bin_by_words(rs, 50);
  REQUIRE(r.bins.size() == 3);
  CHECK(r.bins[0].ids == std::vector<std::string>{"a"});
  CHECK(r.bins[1].ids == std::vector<std::string>{"b"});
  CHECK(r.bins[2].ids == std::vector<std::string>{"c"});
  // Boundaries are half-open.
  std::vector<ResultRecord> edge = {record("x", 50, 1), record("y", 100, 1), record("z", 49, 1)};
  auto e = counts(bin_by_words(edge, 50));
  CHECK(e["0-50"] == 1);
  CHECK(e["50-100"] == 1);
  CHECK(e["100-"] == 1);
  CHECK_THROWS_AS(bin_by_words(edge, 0), ConfigError);
}

TEST_CASE("sentence table layout") {
  std::vector<ResultRecord> rs = {record("a", 10, 1), record("b", 10, 2), record("c", 10, 3),
                                  record("d", 10, 4), record("e", 10, 5), record("f", 10, 8)};
  const std::string table = render_table(bin_by_sentences(rs, 6));
  std::vector<std::string> firsts;
  std::size_t pos = 0;
  while (pos < table.size()) {
    const std::size_t end = table.find('\n', pos);
    const std::string line = table.substr(pos, end - pos);
    firsts.push_back(line.substr(0, line.find(' ')));
    pos = end + 1;
  }
  CHECK(firsts == std::vector<std::string>{"#Sentences", "1", "2", "3", "4", "5", "6+"});
}

TEST_CASE("word comparison table layout") {
  const data::Tokens q = {"what", "is", "it", "?"};
  std::vector<ResultRecord> a = {record("a", 30, 2, q, q), record("b", 70, 3, q, q), record("c", 200, 9, q, q)};
  std::vector<ResultRecord> b = a;
  b[1].hypothesis = {"nothing", "alike"};
  RunComparison c = compare_runs(a, b, "Transformer", "Maxout LSTM", BinKind::kWords, 50);
  CHECK(render_comparison(c) ==
        "#Words  Transformer  Maxout LSTM\n"
        "0-50         100.00       100.00\n"
        "50-100       100.00         0.00\n"
        "100-         100.00       100.00\n");
  std::vector<ResultRecord> sparse = {a[0]};
  RunComparison e = compare_runs(sparse, sparse, "A", "B", BinKind::kWords, 50);
  CHECK(render_comparison(e) ==
        "#Words         A         B\n"
        "0-50      100.00    100.00\n"
        "50-100         -         -\n"
        "100-           -         -\n");
}

TEST_CASE("compare_runs laws") {
  std::mt19937_64 rng(5);
  auto a = random_results(rng, 30);
  auto b = a;
  for (auto& r : b) r.hypothesis.push_back("w1");
  RunComparison self = compare_runs(a, a, "x", "x", BinKind::kSentences, 6);
  for (double d : self.overall_delta) CHECK(d == 0.0);
  for (const auto& bin : self.bins)
    for (double d : bin.delta) CHECK(d == 0.0);

  RunComparison ab = compare_runs(a, b, "a", "b", BinKind::kWords, 50);
  RunComparison ba = compare_runs(b, a, "b", "a", BinKind::kWords, 50);
  for (std::size_t i = 0; i < 6; ++i) CHECK(ab.overall_delta[i] == -ba.overall_delta[i]);
  for (std::size_t k = 0; k < ab.bins.size(); ++k)
    for (std::size_t i = 0; i < 6; ++i) CHECK(ab.bins[k].delta[i] == -ba.bins[k].delta[i]);

  auto c = a;
  c.pop_back();
  c.push_back(record("extra", 1, 1));
  try {
    compare_runs(a, c, "a", "c", BinKind::kWords, 50);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find(a.back().id) != std::string::npos);
    CHECK(msg.find("extra") != std::string::npos);
  }
}

TEST_CASE("report serializations") {
  std::vector<ResultRecord> rs = {record("a", 30, 2), record("b", 70, 3)};
  BinnedReport r = bin_by_words(rs, 50);
  auto j = to_json(r);
  CHECK(j["total"] == 2);
  CHECK(j["bins"].size() == 3);
  CHECK(j["bins"][2]["count"] == 0);
  CHECK(j["bins"][2]["metrics"].is_null());
  const std::string table = render_table(r);
  CHECK(table.find("-         -") != std::string::npos);
  const std::string csv = to_csv(r);
  CHECK(csv.substr(0, csv.find('\n')) == "bin,count,BLEU-1,BLEU-2,BLEU-3,BLEU-4,METEOR,ROUGE-L");
  CHECK(csv.find("100-,0,,,,,,\n") != std::string::npos);
}

TEST_CASE("join_results") {
  std::vector<data::Example> ds = {data::make_example("1", {"a", "b", "."}, {"q", "?"}),
                                   data::make_example("2", {"c", ".", "d", "."}, {"r", "?"})};
  std::map<std::string, data::Tokens> gen = {{"2", {"r"}}};
  auto joined = join_results(gen, ds);
  REQUIRE(joined.size() == 1);
  CHECK(joined[0].answer_sentences == 2);
  CHECK(joined[0].reference == data::Tokens{"r", "?"});
  gen["9"] = {"x"};
  CHECK_THROWS_AS(join_results(gen, ds), DataError);
}
