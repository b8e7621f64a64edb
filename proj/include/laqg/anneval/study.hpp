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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "laqg/error.hpp"

namespace laqg::anneval {

/// Unknown study, item or annotator.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// A write that collides with existing state (duplicate rating or study).
class ConflictError : public Error {
 public:
  using Error::Error;
};

struct StudyConfig {
  std::size_t n_items = 100;
  std::size_t min_annotators = 2;
  int scale_lo = 1;
  int scale_hi = 5;
  std::uint64_t seed = 1;
  std::size_t sentence_cap = 6;

  /// ConfigError unless min_annotators >= 2, the scale is non-empty and
  /// n_items, sentence_cap are positive.
  void validate() const;
};

struct EvalItem {
  std::string item_id;
  std::string example_id;
  std::string answer;
  std::string question;
  std::string model;
  std::size_t answer_sentences = 0;
};

struct RatingRecord {
  std::string item_id;
  std::string annotator;
  int fluency = 0;
  int correctness = 0;
  std::string timestamp;  // ISO-8601 UTC, filled in by the study when empty
};

/// Questions generated by one model, keyed by example id.
struct GenerationRun {
  std::string model;
  std::map<std::string, std::string> questions;
};

struct Candidate {
  std::string example_id;
  std::string answer;
  std::size_t answer_sentences = 0;
};

/// Draws `config.n_items` distinct examples uniformly (seeded) from those
/// present in every run and in `candidates`, and assigns models round-robin
/// over the shuffled order so the study interleaves them. Too few shared
/// examples is a DataError.
std::vector<EvalItem> sample_items(const std::vector<GenerationRun>& runs,
                                   const std::vector<Candidate>& candidates, const StudyConfig& config);

struct AgreementReport {
  double fluency_alpha = 0.0;
  double correctness_alpha = 0.0;
  double fluency_pairwise = 0.0;
  double correctness_pairwise = 0.0;
  std::size_t items = 0;
  std::size_t ratings = 0;
};

struct LengthCell {
  std::optional<double> fluency;
  std::optional<double> correctness;
  std::size_t ratings = 0;
};

struct LengthSummary {
  std::vector<std::string> models;
  std::vector<std::string> labels;            // "1" .. "cap-1", "cap+"
  std::vector<std::vector<LengthCell>> cells;  // [row][model]
};

struct Progress {
  std::size_t rated = 0;
  std::size_t total = 0;
};

/// One human-evaluation study: fixed items plus an append-only ledger of
/// annotator registrations and ratings. Writes are serialized and reach the
/// ledger file before the in-memory state changes; reads see a consistent
/// snapshot.
class Study {
 public:
  /// Starts a study and writes its ledger header; an existing ledger file is
  /// a ConflictError.
  static std::unique_ptr<Study> create(const std::string& id, const StudyConfig& config,
                                       std::vector<EvalItem> items, const std::filesystem::path& ledger);
  /// Replays a ledger. A torn final line (no trailing newline) is dropped.
  static std::unique_ptr<Study> load(const std::filesystem::path& ledger);

  const std::string& id() const { return id_; }
  const StudyConfig& config() const { return config_; }
  const std::vector<EvalItem>& items() const { return items_; }
  std::vector<std::string> models() const;

  /// Idempotent; returns false when already registered.
  bool register_annotator(const std::string& annotator);
  bool has_annotator(const std::string& annotator) const;

  /// An item the annotator has not rated, preferring the lowest coverage
  /// (ties by study order); nullopt when nothing remains.
  std::optional<EvalItem> next_item(const std::string& annotator) const;
  Progress progress(const std::string& annotator) const;

  /// Validates and appends a rating. Unknown item/annotator: NotFoundError;
  /// score outside the scale: DataError; repeat (item, annotator):
  /// ConflictError.
  RatingRecord record_rating(RatingRecord record);
  std::vector<RatingRecord> ratings() const;
  std::vector<std::size_t> coverage() const;

  /// Ordinal alpha and pairwise agreement per metric. Items rated by fewer
  /// than min_annotators annotators raise ContractError naming them.
  AgreementReport agreement() const;
  LengthSummary summarize_by_length() const;

 private:
  Study() = default;
  void append(const nlohmann::json& event);
  void apply_rating(const RatingRecord& r);

  std::string id_;
  StudyConfig config_;
  std::vector<EvalItem> items_;
  std::map<std::string, std::size_t> item_index_;
  std::set<std::string> annotators_;
  std::vector<RatingRecord> ratings_;
  std::vector<std::set<std::string>> raters_;  // per item
  std::filesystem::path ledger_;
  std::ofstream out_;
  mutable std::shared_mutex mutex_;
};

/// Studies under one data directory, one `<id>.jsonl` ledger each, all
/// rebuilt from disk on construction.
class StudyStore {
 public:
  explicit StudyStore(std::filesystem::path data_dir);

  Study& create(const std::string& id, const StudyConfig& config, const std::vector<GenerationRun>& runs,
                const std::vector<Candidate>& candidates);
  Study& get(const std::string& id);
  bool contains(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::unique_ptr<Study>> studies_;
  mutable std::mutex mutex_;
};

/// Study ids double as file names: letters, digits, '-', '_' only.
bool valid_study_id(const std::string& id);

nlohmann::json to_json(const StudyConfig& c);
StudyConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EvalItem& item);
/// Annotator-facing view: no model tag, no example id.
nlohmann::json public_json(const EvalItem& item);
EvalItem item_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RatingRecord& r);
RatingRecord rating_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AgreementReport& r);
nlohmann::json to_json(const LengthSummary& s);
/// Length-table layout: "#Sentences", then fluency per model, then
/// correctness per model; cells with no ratings show "-".
std::string render_table(const LengthSummary& s);

}  // namespace laqg::anneval
