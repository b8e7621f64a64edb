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

#include "laqg/anneval/study.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "fmt/chrono.h"
#include "fmt/format.h"
#include "laqg/anneval/agreement.hpp"

namespace laqg::anneval {

namespace fs = std::filesystem;
using nlohmann::json;

void StudyConfig::validate() const {
  if (min_annotators < 2) throw ConfigError("a study needs at least two annotators per item");
  if (scale_hi <= scale_lo) throw ConfigError("rating scale must span at least two values");
  if (n_items == 0) throw ConfigError("a study needs at least one item");
  if (sentence_cap == 0) throw ConfigError("sentence cap must be positive");
}

bool valid_study_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; });
}

std::vector<EvalItem> sample_items(const std::vector<GenerationRun>& runs,
                                   const std::vector<Candidate>& candidates, const StudyConfig& config) {
  config.validate();
  if (runs.empty()) throw ContractError("a study needs at least one generation run");
  std::set<std::string> tags;
  for (const auto& r : runs)
    if (!tags.insert(r.model).second) throw ConfigError("duplicate model tag '" + r.model + "'");
  std::vector<const Candidate*> pool;
  for (const auto& c : candidates) {
    bool shared = true;
    for (const auto& r : runs) shared = shared && r.questions.count(c.example_id);
    if (shared) pool.push_back(&c);
  }
  std::sort(pool.begin(), pool.end(), [](auto* a, auto* b) { return a->example_id < b->example_id; });
  pool.erase(std::unique(pool.begin(), pool.end(), [](auto* a, auto* b) { return a->example_id == b->example_id; }),
             pool.end());
  if (config.n_items > pool.size()) {
    throw DataError(fmt::format("insufficient items: {} requested, {} examples shared by every run",
                                config.n_items, pool.size()));
  }
  std::mt19937_64 rng(config.seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<EvalItem> items;
  const int width = static_cast<int>(std::to_string(config.n_items).size());
  for (std::size_t i = 0; i < config.n_items; ++i) {
    const Candidate& c = *pool[i];
    const GenerationRun& run = runs[i % runs.size()];
    items.push_back({fmt::format("item-{:0{}}", i + 1, width), c.example_id, c.answer,
                     run.questions.at(c.example_id), run.model, c.answer_sentences});
  }
  return items;
}

json to_json(const StudyConfig& c) {
  return {{"n_items", c.n_items},   {"min_annotators", c.min_annotators}, {"scale", {c.scale_lo, c.scale_hi}},
          {"seed", c.seed},         {"sentence_cap", c.sentence_cap}};
}

StudyConfig config_from_json(const json& j) {
  StudyConfig c;
  c.n_items = j.value("n_items", c.n_items);
  c.min_annotators = j.value("min_annotators", c.min_annotators);
  if (j.contains("scale")) {
    c.scale_lo = j.at("scale").at(0).get<int>();
    c.scale_hi = j.at("scale").at(1).get<int>();
  }
  c.seed = j.value("seed", c.seed);
  c.sentence_cap = j.value("sentence_cap", c.sentence_cap);
  return c;
}

json to_json(const EvalItem& item) {
  return {{"item_id", item.item_id}, {"example_id", item.example_id},   {"answer", item.answer},
          {"question", item.question}, {"model", item.model}, {"answer_sentences", item.answer_sentences}};
}

json public_json(const EvalItem& item) {
  return {{"item_id", item.item_id}, {"answer", item.answer}, {"question", item.question}};
}

EvalItem item_from_json(const json& j) {
  return {j.at("item_id").get<std::string>(), j.at("example_id").get<std::string>(),
          j.at("answer").get<std::string>(),  j.at("question").get<std::string>(),
          j.at("model").get<std::string>(),   j.at("answer_sentences").get<std::size_t>()};
}

json to_json(const RatingRecord& r) {
  return {{"item_id", r.item_id},
          {"annotator", r.annotator},
          {"fluency", r.fluency},
          {"correctness", r.correctness},
          {"timestamp", r.timestamp}};
}

RatingRecord rating_from_json(const json& j) {
  RatingRecord r;
  try {
    r.item_id = j.at("item_id").get<std::string>();
    r.annotator = j.at("annotator").get<std::string>();
    r.fluency = j.at("fluency").get<int>();
    r.correctness = j.at("correctness").get<int>();
    r.timestamp = j.value("timestamp", std::string());
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed rating: ") + e.what());
  }
  return r;
}

json to_json(const AgreementReport& r) {
  return {{"fluency_alpha", r.fluency_alpha},
          {"correctness_alpha", r.correctness_alpha},
          {"mean_pairwise", {{"fluency", r.fluency_pairwise}, {"correctness", r.correctness_pairwise}}},
          {"statistic", "Krippendorff's alpha, ordinal"},
          {"items", r.items},
          {"ratings", r.ratings}};
}

json to_json(const LengthSummary& s) {
  json rows = json::array();
  for (std::size_t r = 0; r < s.labels.size(); ++r) {
    json row = {{"sentences", s.labels[r]}};
    json per = json::object();
    for (std::size_t m = 0; m < s.models.size(); ++m) {
      const LengthCell& c = s.cells[r][m];
      per[s.models[m]] = {{"fluency", c.fluency ? json(*c.fluency) : json(nullptr)},
                          {"correctness", c.correctness ? json(*c.correctness) : json(nullptr)},
                          {"ratings", c.ratings}};
    }
    row["models"] = per;
    rows.push_back(row);
  }
  return {{"models", s.models}, {"rows", rows}};
}

std::string render_table(const LengthSummary& s) {
  std::vector<std::string> heads = {"#Sentences"};
  for (const auto& m : s.models) heads.push_back("Fluency (" + m + ")");
  for (const auto& m : s.models) heads.push_back("Correctness (" + m + ")");
  std::string out = heads[0];
  for (std::size_t i = 1; i < heads.size(); ++i) out += "  " + heads[i];
  out += "\n";
  auto cell = [](const std::optional<double>& v, std::size_t w) {
    return v ? fmt::format("{:>{}.2f}", *v, w) : fmt::format("{:>{}}", "-", w);
  };
  for (std::size_t r = 0; r < s.labels.size(); ++r) {
    out += fmt::format("{:<{}}", s.labels[r], heads[0].size());
    for (std::size_t m = 0; m < s.models.size(); ++m) out += "  " + cell(s.cells[r][m].fluency, heads[1 + m].size());
    for (std::size_t m = 0; m < s.models.size(); ++m)
      out += "  " + cell(s.cells[r][m].correctness, heads[1 + s.models.size() + m].size());
    out += "\n";
  }
  return out;
}

namespace {

std::string now_utc() {
  const auto now = std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%S}Z", now);
}

}  // namespace

std::unique_ptr<Study> Study::create(const std::string& id, const StudyConfig& config,
                                     std::vector<EvalItem> items, const fs::path& ledger) {
  if (!valid_study_id(id)) throw DataError("invalid study id '" + id + "'");
  config.validate();
  if (items.empty()) throw ContractError("a study needs items");
  if (fs::exists(ledger)) throw ConflictError("study '" + id + "' already exists");
  std::unique_ptr<Study> s(new Study());
  s->id_ = id;
  s->config_ = config;
  s->items_ = std::move(items);
  s->raters_.resize(s->items_.size());
  for (std::size_t i = 0; i < s->items_.size(); ++i) s->item_index_[s->items_[i].item_id] = i;
  s->ledger_ = ledger;
  s->out_.open(ledger, std::ios::app);
  if (!s->out_) throw IoError("cannot open study ledger " + ledger.string());
  json items_json = json::array();
  for (const auto& it : s->items_) items_json.push_back(to_json(it));
  s->append({{"type", "study"}, {"id", id}, {"config", to_json(config)}, {"items", items_json}});
  return s;
}

std::unique_ptr<Study> Study::load(const fs::path& ledger) {
  std::ifstream in(ledger, std::ios::binary);
  if (!in) throw IoError("cannot read study ledger " + ledger.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::unique_ptr<Study> s(new Study());
  s->ledger_ = ledger;
  std::size_t pos = 0, line_no = 0;
  bool header = false;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) break;  // torn final write
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    json ev;
    try {
      ev = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(fmt::format("{}:{}: {}", ledger.string(), line_no, e.what()));
    }
    const std::string type = ev.value("type", "");
    if (!header) {
      if (type != "study") throw DataError(ledger.string() + ": ledger must start with a study header");
      s->id_ = ev.at("id").get<std::string>();
      s->config_ = config_from_json(ev.at("config"));
      for (const auto& it : ev.at("items")) s->items_.push_back(item_from_json(it));
      s->raters_.resize(s->items_.size());
      for (std::size_t i = 0; i < s->items_.size(); ++i) s->item_index_[s->items_[i].item_id] = i;
      header = true;
    } else if (type == "annotator") {
      s->annotators_.insert(ev.at("annotator").get<std::string>());
    } else if (type == "rating") {
      RatingRecord r = rating_from_json(ev.at("rating"));
      auto it = s->item_index_.find(r.item_id);
      if (it == s->item_index_.end()) throw DataError(fmt::format("{}:{}: unknown item", ledger.string(), line_no));
      if (s->raters_[it->second].count(r.annotator)) continue;  // replayed duplicate
      s->annotators_.insert(r.annotator);
      s->apply_rating(r);
    } else {
      throw DataError(fmt::format("{}:{}: unknown event '{}'", ledger.string(), line_no, type));
    }
  }
  if (!header) throw DataError(ledger.string() + ": empty study ledger");
  if (pos < text.size()) {
    // Drop the torn tail so later appends start on a fresh line.
    fs::resize_file(ledger, pos);
  }
  s->out_.open(ledger, std::ios::app);
  if (!s->out_) throw IoError("cannot open study ledger " + ledger.string());
  return s;
}

void Study::append(const json& event) {
  out_ << event.dump() << '\n';
  out_.flush();
  if (!out_) throw IoError("failed to write study ledger " + ledger_.string());
}

void Study::apply_rating(const RatingRecord& r) {
  raters_[item_index_.at(r.item_id)].insert(r.annotator);
  ratings_.push_back(r);
}

std::vector<std::string> Study::models() const {
  std::vector<std::string> out;
  for (const auto& it : items_)
    if (std::find(out.begin(), out.end(), it.model) == out.end()) out.push_back(it.model);
  return out;
}

bool Study::register_annotator(const std::string& annotator) {
  if (annotator.empty()) throw DataError("annotator id must not be empty");
  std::unique_lock lock(mutex_);
  if (annotators_.count(annotator)) return false;
  append({{"type", "annotator"}, {"annotator", annotator}});
  annotators_.insert(annotator);
  return true;
}

bool Study::has_annotator(const std::string& annotator) const {
  std::shared_lock lock(mutex_);
  return annotators_.count(annotator) > 0;
}

std::optional<EvalItem> Study::next_item(const std::string& annotator) const {
  std::shared_lock lock(mutex_);
  if (!annotators_.count(annotator)) throw NotFoundError("unknown annotator '" + annotator + "'");
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (raters_[i].count(annotator)) continue;
    if (!best || raters_[i].size() < raters_[*best].size()) best = i;
  }
  if (!best) return std::nullopt;
  return items_[*best];
}

Progress Study::progress(const std::string& annotator) const {
  std::shared_lock lock(mutex_);
  Progress p;
  p.total = items_.size();
  for (const auto& r : raters_) p.rated += r.count(annotator);
  return p;
}

RatingRecord Study::record_rating(RatingRecord record) {
  std::unique_lock lock(mutex_);
  auto it = item_index_.find(record.item_id);
  if (it == item_index_.end()) throw NotFoundError("unknown item '" + record.item_id + "'");
  if (!annotators_.count(record.annotator)) throw NotFoundError("unknown annotator '" + record.annotator + "'");
  for (auto [name, v] : {std::pair{"fluency", record.fluency}, std::pair{"correctness", record.correctness}}) {
    if (v < config_.scale_lo || v > config_.scale_hi) {
      throw DataError(fmt::format("{} {} outside scale [{}, {}]", name, v, config_.scale_lo, config_.scale_hi));
    }
  }
  if (raters_[it->second].count(record.annotator)) {
    throw ConflictError(fmt::format("annotator '{}' already rated '{}'", record.annotator, record.item_id));
  }
  if (record.timestamp.empty()) record.timestamp = now_utc();
  append({{"type", "rating"}, {"rating", to_json(record)}});
  apply_rating(record);
  return record;
}

std::vector<RatingRecord> Study::ratings() const {
  std::shared_lock lock(mutex_);
  return ratings_;
}

std::vector<std::size_t> Study::coverage() const {
  std::shared_lock lock(mutex_);
  std::vector<std::size_t> out;
  for (const auto& r : raters_) out.push_back(r.size());
  return out;
}

AgreementReport Study::agreement() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> under;
  for (std::size_t i = 0; i < items_.size(); ++i)
    if (raters_[i].size() < config_.min_annotators) under.push_back(items_[i].item_id);
  if (!under.empty()) {
    std::string list;
    for (std::size_t i = 0; i < under.size(); ++i) list += (i ? ", " : "") + under[i];
    throw ContractError(fmt::format("{} item(s) below {} annotators: {}", under.size(), config_.min_annotators, list));
  }
  Units fluency(items_.size()), correctness(items_.size());
  for (const auto& r : ratings_) {
    const std::size_t i = item_index_.at(r.item_id);
    fluency[i].push_back(r.fluency);
    correctness[i].push_back(r.correctness);
  }
  AgreementReport rep;
  rep.fluency_alpha = ordinal_alpha(fluency, config_.scale_lo, config_.scale_hi);
  rep.correctness_alpha = ordinal_alpha(correctness, config_.scale_lo, config_.scale_hi);
  rep.fluency_pairwise = mean_pairwise_agreement(fluency);
  rep.correctness_pairwise = mean_pairwise_agreement(correctness);
  rep.items = items_.size();
  rep.ratings = ratings_.size();
  return rep;
}

LengthSummary Study::summarize_by_length() const {
  std::shared_lock lock(mutex_);
  LengthSummary s;
  s.models = models();
  const std::size_t cap = config_.sentence_cap;
  for (std::size_t k = 1; k < cap; ++k) s.labels.push_back(std::to_string(k));
  s.labels.push_back(std::to_string(cap) + "+");
  struct Acc {
    double f = 0, c = 0;
    std::size_t n = 0;
  };
  std::vector<std::vector<Acc>> acc(cap, std::vector<Acc>(s.models.size()));
  for (const auto& r : ratings_) {
    const EvalItem& item = items_[item_index_.at(r.item_id)];
    const std::size_t row = std::min(std::max<std::size_t>(item.answer_sentences, 1), cap) - 1;
    const std::size_t m = std::find(s.models.begin(), s.models.end(), item.model) - s.models.begin();
    acc[row][m].f += r.fluency;
    acc[row][m].c += r.correctness;
    ++acc[row][m].n;
  }
  s.cells.assign(cap, std::vector<LengthCell>(s.models.size()));
  for (std::size_t row = 0; row < cap; ++row)
    for (std::size_t m = 0; m < s.models.size(); ++m) {
      const Acc& a = acc[row][m];
      LengthCell& cell = s.cells[row][m];
      cell.ratings = a.n;
      if (a.n) {
        cell.fluency = a.f / static_cast<double>(a.n);
        cell.correctness = a.c / static_cast<double>(a.n);
      }
    }
  return s;
}

StudyStore::StudyStore(fs::path data_dir) : dir_(std::move(data_dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create data directory " + dir_.string() + ": " + ec.message());
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() != ".jsonl") continue;
    auto study = Study::load(entry.path());
    const std::string id = study->id();
    studies_.emplace(id, std::move(study));
  }
}

Study& StudyStore::create(const std::string& id, const StudyConfig& config, const std::vector<GenerationRun>& runs,
                          const std::vector<Candidate>& candidates) {
  if (!valid_study_id(id)) throw DataError("invalid study id '" + id + "'");
  std::lock_guard lock(mutex_);
  if (studies_.count(id)) throw ConflictError("study '" + id + "' already exists");
  auto study = Study::create(id, config, sample_items(runs, candidates, config), dir_ / (id + ".jsonl"));
  Study& ref = *study;
  studies_.emplace(id, std::move(study));
  return ref;
}

Study& StudyStore::get(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = studies_.find(id);
  if (it == studies_.end()) throw NotFoundError("unknown study '" + id + "'");
  return *it->second;
}

bool StudyStore::contains(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return studies_.count(id) > 0;
}

std::vector<std::string> StudyStore::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : studies_) out.push_back(id);
  return out;
}

}  // namespace laqg::anneval
