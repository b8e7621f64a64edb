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

// Independent formulation of ordinal Krippendorff's alpha, used as the
// oracle for the coincidence-matrix implementation.

#include <random>
#include <utility>
#include <vector>

#include "laqg/anneval/agreement.hpp"

namespace laqg::testing {

/// Alpha from its pairwise definition: value frequencies are counted
/// directly, D_o averages within-unit pair distances weighted by 1/(m-1),
/// and D_e averages distances over every pair of pairable values.
inline double pairwise_alpha(const anneval::Units& units, int lo, int hi) {
  std::vector<int> values;
  for (const auto& u : units)
    if (u.size() >= 2) values.insert(values.end(), u.begin(), u.end());
  const double n = static_cast<double>(values.size());
  std::vector<double> freq(hi - lo + 1, 0.0);
  for (int v : values) freq[v - lo] += 1.0;
  auto d2 = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    double s = 0.0;
    for (int g = a; g <= b; ++g) s += freq[g - lo];
    s -= (freq[a - lo] + freq[b - lo]) / 2.0;
    return s * s;
  };
  double observed = 0.0;
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    double within = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j)
        if (i != j) within += d2(u[i], u[j]);
    observed += within / static_cast<double>(u.size() - 1);
  }
  observed /= n;
  double expected = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < values.size(); ++j)
      if (i != j) expected += d2(values[i], values[j]);
  expected /= n * (n - 1.0);
  return 1.0 - observed / expected;
}

/// Independent uniform ratings on the 1..5 scale.
inline anneval::Units random_units(std::mt19937_64& rng, std::size_t items, std::size_t raters) {
  std::uniform_int_distribution<int> score(1, 5);
  anneval::Units units(items);
  for (auto& u : units)
    for (std::size_t r = 0; r < raters; ++r) u.push_back(score(rng));
  return units;
}

}  // namespace laqg::testing
