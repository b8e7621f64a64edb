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

// Random result sets and an explicit bin labeler for length-bucket tests.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "laqg/bench/analysis.hpp"

namespace laqg::testing {

inline bench::ResultRecord record(const std::string& id, std::size_t words, std::size_t sentences,
                                  data::Tokens hyp = {"what", "is", "it", "?"},
                                  data::Tokens ref = {"what", "is", "this", "?"}) {
  return {id, std::move(hyp), std::move(ref), words, sentences};
}

inline std::vector<bench::ResultRecord> random_results(std::mt19937_64& rng, std::size_t n) {
  std::vector<bench::ResultRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    data::Tokens hyp, ref;
    for (std::size_t k = 1 + rng() % 6; k > 0; --k) hyp.push_back("w" + std::to_string(rng() % 5));
    for (std::size_t k = 1 + rng() % 6; k > 0; --k) ref.push_back("w" + std::to_string(rng() % 5));
    out.push_back(record("r" + std::to_string(i), rng() % 260, rng() % 10, hyp, ref));
  }
  return out;
}

/// Independent label assignment written as explicit comparisons.
inline std::string word_label(std::size_t words) {
  if (words < 50) return "0-50";
  if (words < 100) return "50-100";
  return "100-";
}

inline std::string sentence_label(std::size_t s) {
  if (s <= 1) return "1";
  if (s >= 6) return "6+";
  return std::to_string(s);
}

}  // namespace laqg::testing
