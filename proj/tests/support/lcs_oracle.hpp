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

// Brute-force longest-common-subsequence oracle over small alphabets:
// every subsequence of every string is enumerated explicitly, so no dynamic
// programming is involved.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "laqg/data/text.hpp"
#include "laqg/metrics/metrics.hpp"

namespace laqg::testing {

class SubsequenceOracle {
 public:
  SubsequenceOracle(std::size_t alphabet, std::size_t max_len) : alphabet_(alphabet) {
    // Strings are numbered by length, then lexicographically.
    offset_.push_back(0);
    std::size_t count = 1;
    for (std::size_t len = 0; len <= max_len; ++len) {
      offset_.push_back(offset_.back() + count);
      count *= alphabet;
    }
    for (std::size_t len = 0; len <= max_len; ++len) {
      std::vector<int> s(len, 0);
      while (true) {
        strings_.push_back(s);
        std::size_t k = len;
        while (k > 0 && s[k - 1] == static_cast<int>(alphabet) - 1) s[--k] = 0;
        if (k == 0) break;
        ++s[k - 1];
      }
    }
    const std::size_t n = strings_.size();
    words_ = (n + 63) / 64;
    member_.assign(n * words_, 0);
    subseq_.resize(n);
    for (std::size_t id = 0; id < n; ++id) {
      const auto& s = strings_[id];
      for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
        std::vector<int> sub;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (mask & (1u << i)) sub.push_back(s[i]);
        const std::size_t sid = code(sub);
        member_[id * words_ + sid / 64] |= std::uint64_t{1} << (sid % 64);
        subseq_[id].push_back(sid);
      }
      // Codes grow with length, so descending code order is longest first.
      std::sort(subseq_[id].begin(), subseq_[id].end(), std::greater<>());
      subseq_[id].erase(std::unique(subseq_[id].begin(), subseq_[id].end()), subseq_[id].end());
    }
  }

  std::size_t size() const { return strings_.size(); }
  const std::vector<int>& string(std::size_t id) const { return strings_[id]; }

  data::Tokens tokens(std::size_t id) const {
    data::Tokens t;
    for (int c : strings_[id]) t.push_back(std::string(1, static_cast<char>('a' + c)));
    return t;
  }

  /// Length of the longest subsequence of `a` that is also one of `b`.
  std::size_t lcs(std::size_t a, std::size_t b) const {
    const std::uint64_t* row = &member_[b * words_];
    for (std::size_t sid : subseq_[a])
      if (row[sid / 64] >> (sid % 64) & 1u) return strings_[sid].size();
    return 0;
  }

  /// ROUGE-L F (beta = 1) from first principles.
  double rouge_f(std::size_t a, std::size_t b) const {
    const std::size_t l = lcs(a, b);
    if (l == 0) return 0.0;
    const double p = static_cast<double>(l) / static_cast<double>(strings_[a].size());
    const double r = static_cast<double>(l) / static_cast<double>(strings_[b].size());
    return 2.0 * p * r / (p + r);
  }

 private:
  std::size_t code(const std::vector<int>& s) const {
    std::size_t v = 0;
    for (int c : s) v = v * alphabet_ + static_cast<std::size_t>(c);
    return offset_[s.size()] + v;
  }

  std::size_t alphabet_;
  std::vector<std::size_t> offset_;
  std::vector<std::vector<int>> strings_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> member_;
  std::vector<std::vector<std::size_t>> subseq_;
};

struct ExhaustiveRougeResult {
  std::size_t pairs = 0;
  std::size_t lcs_mismatches = 0;
  double max_f_error = 0.0;
};

/// Compares rouge_l_pair with the oracle on every pair of strings up to
/// `max_len` over `alphabet` symbols. The beta = 1 F-measure is symmetric,
/// so each unordered pair is checked once.
inline ExhaustiveRougeResult exhaustive_rouge(std::size_t alphabet, std::size_t max_len) {
  SubsequenceOracle oracle(alphabet, max_len);
  std::vector<data::Tokens> toks;
  for (std::size_t i = 0; i < oracle.size(); ++i) toks.push_back(oracle.tokens(i));
  ExhaustiveRougeResult r;
  for (std::size_t a = 0; a < oracle.size(); ++a) {
    for (std::size_t b = a; b < oracle.size(); ++b) {
      ++r.pairs;
      // With beta = 1, F = 2 LCS / (|a| + |b|), so F pins down the LCS.
      const double got = metrics::rouge_l_pair(toks[a], toks[b]);
      const double total = static_cast<double>(toks[a].size() + toks[b].size());
      if (static_cast<std::size_t>(std::lround(got * total / 2.0)) != oracle.lcs(a, b)) ++r.lcs_mismatches;
      r.max_f_error = std::max(r.max_f_error, std::abs(got - oracle.rouge_f(a, b)));
    }
  }
  return r;
}

}  // namespace laqg::testing
