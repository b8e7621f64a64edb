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

#include <vector>

namespace laqg::anneval {

/// Ratings grouped by unit (rated item): each inner vector holds the values
/// the unit received, one per annotator who rated it. Units with fewer than
/// two values carry no pairable information and are ignored.
using Units = std::vector<std::vector<int>>;

/// Coincidence matrix over the rating scale [lo, hi]: entry (c, k) sums, over
/// units, the number of ordered (c, k) value pairs from distinct annotators
/// divided by (values in the unit - 1).
std::vector<std::vector<double>> coincidence_matrix(const Units& units, int lo, int hi);

/// Krippendorff's alpha with the ordinal difference function
///   delta^2(c, k) = (sum_{g=c..k} n_g - (n_c + n_k) / 2)^2
/// where n_g are the coincidence marginals. alpha = 1 - D_o / D_e. When the
/// observed disagreement is zero alpha is 1 (this includes the degenerate
/// case where every pairable value is identical and D_e is also zero).
/// Values outside [lo, hi] are a DataError.
double ordinal_alpha(const Units& units, int lo, int hi);

/// Fraction of annotator pairs within a unit that gave identical values,
/// pooled over all units; 1 when no unit has two values.
double mean_pairwise_agreement(const Units& units);

}  // namespace laqg::anneval
