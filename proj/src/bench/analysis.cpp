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

#include "laqg/bench/analysis.hpp"

#include <algorithm>
#include <set>

#include "fmt/format.h"
#include "laqg/error.hpp"

namespace laqg::bench {

using metrics::MetricReport;

std::vector<ResultRecord> join_results(const std::map<std::string, data::Tokens>& generations,
                                       std::span<const data::Example> dataset) {
  std::vector<ResultRecord> out;
  std::set<std::string> seen;
  for (const auto& ex : dataset) {
    auto it = generations.find(ex.id);
    if (it == generations.end()) continue;
    out.push_back({ex.id, it->second, ex.question, ex.answer_words, ex.answer_sentences});
    seen.insert(ex.id);
  }
  std::vector<std::string> unknown;
  for (const auto& [id, _] : generations)
    if (!seen.count(id)) unknown.push_back(id);
  if (!unknown.empty()) {
    std::string list;
    for (std::size_t i = 0; i < unknown.size() && i < 20; ++i) list += (i ? ", " : "") + unknown[i];
    if (unknown.size() > 20) list += fmt::format(", ... ({} total)", unknown.size());
    throw DataError("generations reference ids missing from the dataset: " + list);
  }
  return out;
}

std::size_t BinnedReport::total() const {
  std::size_t n = 0;
  for (const auto& b : bins) n += b.ids.size();
  return n;
}

namespace {

MetricReport score(std::span<const ResultRecord> results, const std::vector<std::size_t>& members,
                   const metrics::MetricOptions& options) {
  if (members.empty()) return {};
  std::vector<data::Tokens> hyps, refs;
  for (std::size_t i : members) {
    hyps.push_back(results[i].hypothesis);
    refs.push_back(results[i].reference);
  }
  return metrics::evaluate_corpus(hyps, refs, options);
}

BinnedReport assemble(BinKind kind, std::span<const ResultRecord> results,
                      const std::vector<std::string>& labels,
                      const std::vector<std::size_t>& bin_of, const metrics::MetricOptions& options) {
  std::vector<std::vector<std::size_t>> members(labels.size());
  for (std::size_t i = 0; i < results.size(); ++i) members[bin_of[i]].push_back(i);
  BinnedReport report;
  report.kind = kind;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    Bin bin;
    bin.label = labels[b];
    for (std::size_t i : members[b]) bin.ids.push_back(results[i].id);
    bin.report = score(results, members[b], options);
    report.bins.push_back(std::move(bin));
  }
  return report;
}

MetricDelta delta(const MetricReport& a, const MetricReport& b) {
  MetricDelta d{};
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = va[i] - vb[i];
  return d;
}

BinnedReport bin(std::span<const ResultRecord> results, BinKind kind, std::size_t param,
                 const metrics::MetricOptions& options) {
  return kind == BinKind::kWords ? bin_by_words(results, param, 3, options)
                                 : bin_by_sentences(results, param, options);
}

nlohmann::ordered_json delta_json(const MetricDelta& d) {
  nlohmann::ordered_json j;
  for (std::size_t i = 0; i < d.size(); ++i) j[MetricReport::columns()[i]] = d[i];
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

BinnedReport bin_by_words(std::span<const ResultRecord> results, std::size_t width,
                          std::size_t num_bins, const metrics::MetricOptions& options) {
  if (width == 0) throw ConfigError("word bin width must be positive");
  if (num_bins == 0) throw ConfigError("need at least one word bin");
  std::vector<std::string> labels;
  for (std::size_t b = 0; b + 1 < num_bins; ++b) labels.push_back(fmt::format("{}-{}", b * width, (b + 1) * width));
  labels.push_back(fmt::format("{}-", (num_bins - 1) * width));
  std::vector<std::size_t> bin_of;
  for (const auto& r : results) bin_of.push_back(std::min(r.answer_words / width, num_bins - 1));
  return assemble(BinKind::kWords, results, labels, bin_of, options);
}

BinnedReport bin_by_sentences(std::span<const ResultRecord> results, std::size_t cap,
                              const metrics::MetricOptions& options) {
  if (cap == 0) throw ConfigError("sentence cap must be positive");
  std::vector<std::string> labels;
  for (std::size_t s = 1; s < cap; ++s) labels.push_back(std::to_string(s));
  labels.push_back(std::to_string(cap) + "+");
  std::vector<std::size_t> bin_of;
  for (const auto& r : results) bin_of.push_back(std::min(std::max<std::size_t>(r.answer_sentences, 1), cap) - 1);
  return assemble(BinKind::kSentences, results, labels, bin_of, options);
}

RunComparison compare_runs(std::span<const ResultRecord> a, std::span<const ResultRecord> b,
                           const std::string& name_a, const std::string& name_b, BinKind kind,
                           std::size_t param, const metrics::MetricOptions& options) {
  std::set<std::string> ids_a, ids_b;
  for (const auto& r : a) ids_a.insert(r.id);
  for (const auto& r : b) ids_b.insert(r.id);
  if (ids_a != ids_b) {
    std::vector<std::string> only_a, only_b;
    std::set_difference(ids_a.begin(), ids_a.end(), ids_b.begin(), ids_b.end(), std::back_inserter(only_a));
    std::set_difference(ids_b.begin(), ids_b.end(), ids_a.begin(), ids_a.end(), std::back_inserter(only_b));
    auto list = [](const std::vector<std::string>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size() && i < 20; ++i) s += (i ? ", " : "") + v[i];
      if (v.size() > 20) s += fmt::format(", ... ({} total)", v.size());
      return v.empty() ? std::string("none") : s;
    };
    throw DataError(fmt::format("runs cover different examples; missing from {}: {}; missing from {}: {}",
                                name_b, list(only_a), name_a, list(only_b)));
  }
  if (a.empty()) throw ContractError("compare_runs: no results");
  RunComparison c;
  c.name_a = name_a;
  c.name_b = name_b;
  c.kind = kind;
  std::vector<std::size_t> all_a(a.size()), all_b(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) all_a[i] = i;
  for (std::size_t i = 0; i < b.size(); ++i) all_b[i] = i;
  c.overall_a = score(a, all_a, options);
  c.overall_b = score(b, all_b, options);
  c.overall_delta = delta(c.overall_a, c.overall_b);
  const BinnedReport ba = bin(a, kind, param, options);
  const BinnedReport bb = bin(b, kind, param, options);
  for (std::size_t i = 0; i < ba.bins.size(); ++i) {
    c.bins.push_back({ba.bins[i].label, ba.bins[i].report, bb.bins[i].report,
                      delta(ba.bins[i].report, bb.bins[i].report)});
  }
  return c;
}

std::string bin_header(BinKind kind) { return kind == BinKind::kWords ? "#Words" : "#Sentences"; }

nlohmann::ordered_json to_json(const BinnedReport& report) {
  nlohmann::ordered_json j;
  j["binning"] = report.kind == BinKind::kWords ? "words" : "sentences";
  j["total"] = report.total();
  j["bleu"] = "corpus-level within each bin";
  j["note"] = metrics::kMeteorNote;
  j["bins"] = nlohmann::ordered_json::array();
  for (const auto& b : report.bins) {
    nlohmann::ordered_json e;
    e["label"] = b.label;
    e["count"] = b.ids.size();
    e["metrics"] = b.ids.empty() ? nlohmann::ordered_json(nullptr) : metrics::to_json(b.report);
    j["bins"].push_back(e);
  }
  return j;
}

nlohmann::ordered_json to_json(const RunComparison& c) {
  nlohmann::ordered_json j;
  j["run_a"] = c.name_a;
  j["run_b"] = c.name_b;
  j["binning"] = c.kind == BinKind::kWords ? "words" : "sentences";
  j["overall"] = {{"a", metrics::to_json(c.overall_a)},
                  {"b", metrics::to_json(c.overall_b)},
                  {"delta", delta_json(c.overall_delta)}};
  j["bins"] = nlohmann::ordered_json::array();
  for (const auto& b : c.bins) {
    nlohmann::ordered_json e;
    e["label"] = b.label;
    e["count"] = b.a.count;
    e["a"] = metrics::to_json(b.a);
    e["b"] = metrics::to_json(b.b);
    e["delta"] = delta_json(b.delta);
    j["bins"].push_back(e);
  }
  j["presumed_length_table_metric"] = "BLEU-4";
  return j;
}

std::string render_table(const BinnedReport& report) {
  const std::string head = bin_header(report.kind);
  std::size_t width = head.size();
  for (const auto& b : report.bins) width = std::max(width, b.label.size());
  std::string out = fmt::format("{:<{}}", head, width);
  for (const char* c : MetricReport::columns()) out += fmt::format("  {:>8}", c);
  out += fmt::format("  {:>6}\n", "n");
  for (const auto& b : report.bins) {
    out += fmt::format("{:<{}}", b.label, width);
    for (double v : b.report.values()) out += b.ids.empty() ? fmt::format("  {:>8}", "-") : fmt::format("  {:>8.2f}", v);
    out += fmt::format("  {:>6}\n", b.ids.size());
  }
  return out;
}

std::string render_comparison(const RunComparison& c, std::size_t column) {
  if (column >= 6) throw ConfigError("metric column out of range");
  const std::string head = bin_header(c.kind);
  std::size_t width = head.size();
  for (const auto& b : c.bins) width = std::max(width, b.label.size());
  const std::size_t wa = std::max<std::size_t>(c.name_a.size(), 8);
  const std::size_t wb = std::max<std::size_t>(c.name_b.size(), 8);
  std::string out = fmt::format("{:<{}}  {:>{}}  {:>{}}\n", head, width, c.name_a, wa, c.name_b, wb);
  for (const auto& b : c.bins) {
    auto cell = [&](const MetricReport& r, std::size_t w) {
      return r.count == 0 ? fmt::format("{:>{}}", "-", w) : fmt::format("{:>{}.2f}", r.values()[column], w);
    };
    out += fmt::format("{:<{}}  {}  {}\n", b.label, width, cell(b.a, wa), cell(b.b, wb));
  }
  return out;
}

std::string render_deltas(const RunComparison& c) {
  const std::string head = bin_header(c.kind);
  std::size_t width = std::max<std::size_t>(head.size(), 7);
  for (const auto& b : c.bins) width = std::max(width, b.label.size());
  std::string out = fmt::format("{:<{}}", head, width);
  for (const char* col : MetricReport::columns()) out += fmt::format("  {:>8}", col);
  out += "\n";
  auto row = [&](const std::string& label, const MetricDelta& d, bool empty) {
    std::string r = fmt::format("{:<{}}", label, width);
    for (double v : d) r += empty ? fmt::format("  {:>8}", "-") : fmt::format("  {:>+8.2f}", v);
    return r + "\n";
  };
  for (const auto& b : c.bins) out += row(b.label, b.delta, b.a.count == 0);
  out += row("overall", c.overall_delta, false);
  return out;
}

std::string to_csv(const BinnedReport& report) {
  std::string out = "bin,count";
  for (const char* c : MetricReport::columns()) out += std::string(",") + c;
  out += "\n";
  for (const auto& b : report.bins) {
    out += csv_field(b.label) + "," + std::to_string(b.ids.size());
    for (double v : b.report.values()) out += b.ids.empty() ? std::string(",") : fmt::format(",{:.6f}", v);
    out += "\n";
  }
  return out;
}

std::string to_csv(const RunComparison& c) {
  std::string out = "bin,count,run";
  for (const char* col : MetricReport::columns()) out += std::string(",") + col;
  out += "\n";
  auto line = [&](const std::string& label, std::size_t count, const std::string& run, const std::array<double, 6>& v) {
    out += csv_field(label) + "," + std::to_string(count) + "," + csv_field(run);
    for (double x : v) out += fmt::format(",{:.6f}", x);
    out += "\n";
  };
  for (const auto& b : c.bins) {
    line(b.label, b.a.count, c.name_a, b.a.values());
    line(b.label, b.b.count, c.name_b, b.b.values());
    line(b.label, b.a.count, "delta", b.delta);
  }
  line("overall", c.overall_a.count, c.name_a, c.overall_a.values());
  line("overall", c.overall_b.count, c.name_b, c.overall_b.values());
  line("overall", c.overall_a.count, "delta", c.overall_delta);
  return out;
}

}  // namespace laqg::bench
