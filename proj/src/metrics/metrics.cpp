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

#include "laqg/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fmt/format.h"
#include "laqg/error.hpp"
#include "laqg/metrics/porter.hpp"

namespace laqg::metrics {

namespace {

void check_aligned(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs,
                   const char* metric) {
  if (hyps.size() != refs.size()) {
    throw ContractError(std::string(metric) + ": " + std::to_string(hyps.size()) +
                        " hypotheses for " + std::to_string(refs.size()) + " references");
  }
  if (hyps.empty()) throw ContractError(std::string(metric) + ": empty corpus");
}

std::map<std::vector<std::string>, std::size_t> ngrams(const Tokens& t, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++out[{t.begin() + static_cast<std::ptrdiff_t>(i), t.begin() + static_cast<std::ptrdiff_t>(i + n)}];
  return out;
}

/// Equality with a cheap first-character reject before the full compare.
inline bool same_token(const std::string& x, const std::string& y) {
  return x.size() == y.size() && (x.empty() || (x[0] == y[0] && x == y));
}

}  // namespace

BleuResult bleu(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs,
                const BleuOptions& options) {
  check_aligned(hyps, refs, "bleu");
  if (options.max_n == 0) throw ConfigError("bleu: max_n must be positive");
  BleuResult r;
  r.counts.resize(options.max_n);
  for (std::size_t k = 0; k < hyps.size(); ++k) {
    r.hyp_length += hyps[k].size();
    r.ref_length += refs[k].size();
    for (std::size_t n = 1; n <= options.max_n; ++n) {
      const auto h = ngrams(hyps[k], n);
      const auto ref = ngrams(refs[k], n);
      for (const auto& [gram, count] : h) {
        auto it = ref.find(gram);
        r.counts[n - 1].clipped += it == ref.end() ? 0 : std::min(count, it->second);
        r.counts[n - 1].total += count;
      }
    }
  }
  if (r.hyp_length == 0) {
    r.brevity_penalty = 0.0;
  } else if (r.hyp_length > r.ref_length) {
    r.brevity_penalty = 1.0;
  } else {
    r.brevity_penalty = std::exp(1.0 - static_cast<double>(r.ref_length) / static_cast<double>(r.hyp_length));
  }
  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 1; n <= options.max_n; ++n) {
    const NgramCounts& c = r.counts[n - 1];
    double num = static_cast<double>(c.clipped);
    if (c.total == 0 || c.clipped == 0) {
      if (options.epsilon > 0.0 && c.total > 0) {
        num = options.epsilon;
      } else {
        zero = true;
      }
    }
    if (!zero) log_sum += std::log(num / static_cast<double>(c.total));
    r.scores.push_back(zero ? 0.0 : 100.0 * r.brevity_penalty * std::exp(log_sum / static_cast<double>(n)));
  }
  return r;
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  // Single DP row; `diag` carries the previous row's value at j - 1.
  // Short sentences (the common case) keep the row on the stack.
  constexpr std::size_t kStack = 128;
  std::array<std::size_t, kStack> stack_row{};
  std::vector<std::size_t> heap_row;
  std::size_t* row = stack_row.data();
  if (b.size() + 1 > kStack) {
    heap_row.assign(b.size() + 1, 0);
    row = heap_row.data();
  }
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = 0;
    const std::string& ai = a[i - 1];
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = same_token(ai, b[j - 1]) ? diag + 1 : std::max(up, row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

double rouge_l_pair(const Tokens& hyp, const Tokens& ref, double beta) {
  if (beta <= 0.0) throw ConfigError("rouge_l: beta must be positive");
  const std::size_t lcs = lcs_length(hyp, ref);
  if (lcs == 0) return 0.0;
  const double p = static_cast<double>(lcs) / static_cast<double>(hyp.size());
  const double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (r + b2 * p);
}

double rouge_l(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs, double beta) {
  check_aligned(hyps, refs, "rouge_l");
  double total = 0.0;
  for (std::size_t k = 0; k < hyps.size(); ++k) total += rouge_l_pair(hyps[k], refs[k], beta);
  return 100.0 * total / static_cast<double>(hyps.size());
}

MeteorAlignment meteor_align(const Tokens& hyp, const Tokens& ref) {
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> hyp_to_ref(hyp.size(), kNone);
  std::vector<bool> ref_used(ref.size(), false);
  MeteorAlignment a;
  auto stage = [&](const std::vector<std::string>& hk, const std::vector<std::string>& rk, std::size_t& counter) {
    // Length of the run of still-unmatched, equal tokens starting at (i, j).
    auto run = [&](std::size_t i, std::size_t j) {
      std::size_t n = 0;
      while (i + n < hyp.size() && j + n < ref.size() && hyp_to_ref[i + n] == kNone &&
             !ref_used[j + n] && hk[i + n] == rk[j + n])
        ++n;
      return n;
    };
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      if (hyp_to_ref[i] != kNone) continue;
      std::size_t pick = kNone;
      if (i > 0 && hyp_to_ref[i - 1] != kNone) {
        const std::size_t next = hyp_to_ref[i - 1] + 1;
        if (next < ref.size() && !ref_used[next] && rk[next] == hk[i]) pick = next;
      }
      if (pick == kNone) {
        std::size_t best = 0;
        for (std::size_t j = 0; j < ref.size(); ++j) {
          const std::size_t len = run(i, j);
          if (len > best) {
            best = len;
            pick = j;
          }
        }
      }
      if (pick == kNone) continue;
      hyp_to_ref[i] = pick;
      ref_used[pick] = true;
      ++counter;
    }
  };
  stage(hyp, ref, a.exact);
  std::vector<std::string> hs, rs;
  for (const auto& t : hyp) hs.push_back(porter_stem(t));
  for (const auto& t : ref) rs.push_back(porter_stem(t));
  stage(hs, rs, a.stem);
  a.matches = a.exact + a.stem;
  std::size_t prev_ref = kNone;
  bool prev_matched = false;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (hyp_to_ref[i] == kNone) {
      prev_matched = false;
      continue;
    }
    if (!prev_matched || hyp_to_ref[i] != prev_ref + 1) ++a.chunks;
    prev_ref = hyp_to_ref[i];
    prev_matched = true;
  }
  return a;
}

double meteor_pair(const Tokens& hyp, const Tokens& ref, const MeteorParams& params) {
  const MeteorAlignment a = meteor_align(hyp, ref);
  if (a.matches == 0) return 0.0;
  const double m = static_cast<double>(a.matches);
  const double p = m / static_cast<double>(hyp.size());
  const double r = m / static_cast<double>(ref.size());
  const double fmean = p * r / (params.alpha * p + (1.0 - params.alpha) * r);
  const double penalty = params.gamma * std::pow(static_cast<double>(a.chunks) / m, params.beta);
  return fmean * (1.0 - penalty);
}

double meteor_lite(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs,
                   const MeteorParams& params) {
  check_aligned(hyps, refs, "meteor");
  double total = 0.0;
  for (std::size_t k = 0; k < hyps.size(); ++k) total += meteor_pair(hyps[k], refs[k], params);
  return 100.0 * total / static_cast<double>(hyps.size());
}

const std::array<const char*, 6>& MetricReport::columns() {
  static const std::array<const char*, 6> names{"BLEU-1", "BLEU-2", "BLEU-3", "BLEU-4", "METEOR", "ROUGE-L"};
  return names;
}

std::array<double, 6> MetricReport::values() const {
  return {bleu1, bleu2, bleu3, bleu4, meteor, rouge_l};
}

MetricReport evaluate_corpus(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs,
                             const MetricOptions& options) {
  BleuOptions b = options.bleu;
  b.max_n = 4;
  const BleuResult br = bleu(hyps, refs, b);
  MetricReport r;
  r.bleu1 = br.scores[0];
  r.bleu2 = br.scores[1];
  r.bleu3 = br.scores[2];
  r.bleu4 = br.scores[3];
  r.meteor = meteor_lite(hyps, refs, options.meteor);
  r.rouge_l = rouge_l(hyps, refs, options.rouge_beta);
  r.count = hyps.size();
  return r;
}

nlohmann::ordered_json to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  const auto values = report.values();
  for (std::size_t i = 0; i < values.size(); ++i) j[MetricReport::columns()[i]] = values[i];
  j["count"] = report.count;
  return j;
}

MetricReport report_from_json(const nlohmann::json& j) {
  MetricReport r;
  r.bleu1 = j.at("BLEU-1").get<double>();
  r.bleu2 = j.at("BLEU-2").get<double>();
  r.bleu3 = j.at("BLEU-3").get<double>();
  r.bleu4 = j.at("BLEU-4").get<double>();
  r.meteor = j.at("METEOR").get<double>();
  r.rouge_l = j.at("ROUGE-L").get<double>();
  r.count = j.value("count", std::size_t{0});
  return r;
}

std::string format_table(const std::vector<std::pair<std::string, MetricReport>>& rows,
                         const std::string& label_header) {
  std::size_t width = label_header.size();
  for (const auto& [label, _] : rows) width = std::max(width, label.size());
  std::string out = fmt::format("{:<{}}", label_header, width);
  for (const char* c : MetricReport::columns()) out += fmt::format("  {:>8}", c);
  out += fmt::format("  {:>6}\n", "n");
  for (const auto& [label, r] : rows) {
    out += fmt::format("{:<{}}", label, width);
    for (double v : r.values()) out += fmt::format("  {:>8.2f}", v);
    out += fmt::format("  {:>6}\n", r.count);
  }
  return out;
}

}  // namespace laqg::metrics
