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

#include "laqg/anneval/agreement.hpp"

#include <string>

#include "laqg/error.hpp"

namespace laqg::anneval {

std::vector<std::vector<double>> coincidence_matrix(const Units& units, int lo, int hi) {
  if (hi < lo) throw ConfigError("rating scale upper bound below lower bound");
  const std::size_t k = static_cast<std::size_t>(hi - lo + 1);
  std::vector<std::vector<double>> o(k, std::vector<double>(k, 0.0));
  for (const auto& unit : units) {
    for (int v : unit) {
      if (v < lo || v > hi) {
        throw DataError("rating " + std::to_string(v) + " outside scale [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
      }
    }
    const std::size_t m = unit.size();
    if (m < 2) continue;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j) o[unit[i] - lo][unit[j] - lo] += w;
  }
  return o;
}

double ordinal_alpha(const Units& units, int lo, int hi) {
  const auto o = coincidence_matrix(units, lo, hi);
  const std::size_t k = o.size();
  std::vector<double> marginal(k, 0.0);
  double n = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < k; ++d) {
      marginal[c] += o[c][d];
      n += o[c][d];
    }
  if (n < 2.0) throw ContractError("agreement needs at least one unit rated twice");
  // Cumulative marginals turn each ordinal distance into an O(1) lookup.
  std::vector<double> cum(k + 1, 0.0);
  for (std::size_t c = 0; c < k; ++c) cum[c + 1] = cum[c] + marginal[c];
  auto delta2 = [&](std::size_t c, std::size_t d) {
    if (c > d) std::swap(c, d);
    const double span = cum[d + 1] - cum[c] - (marginal[c] + marginal[d]) / 2.0;
    return span * span;
  };
  double observed = 0.0, expected = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < k; ++d) {
      if (c == d) continue;
      const double dd = delta2(c, d);
      observed += o[c][d] * dd;
      expected += marginal[c] * marginal[d] * dd;
    }
  observed /= n;
  expected /= n * (n - 1.0);
  if (observed == 0.0) return 1.0;
  return 1.0 - observed / expected;
}

double mean_pairwise_agreement(const Units& units) {
  double same = 0.0, pairs = 0.0;
  for (const auto& unit : units)
    for (std::size_t i = 0; i < unit.size(); ++i)
      for (std::size_t j = i + 1; j < unit.size(); ++j) {
        pairs += 1.0;
        if (unit[i] == unit[j]) same += 1.0;
      }
  return pairs == 0.0 ? 1.0 : same / pairs;
}

}  // namespace laqg::anneval
