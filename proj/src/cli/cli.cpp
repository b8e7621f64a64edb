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

#include "laqg/cli/cli.hpp"

#include <atomic>
#include <csignal>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "json.hpp"
#include "laqg/anneval/server.hpp"
#include "laqg/autodiff/checkpoint.hpp"
#include "laqg/bench/analysis.hpp"
#include "laqg/cli/manifest.hpp"
#include "laqg/data/example.hpp"
#include "laqg/data/nq.hpp"
#include "laqg/data/text.hpp"
#include "laqg/data/vocab.hpp"
#include "laqg/decoding/search.hpp"
#include "laqg/error.hpp"
#include "laqg/metrics/metrics.hpp"
#include "laqg/models/model.hpp"
#include "laqg/models/trainer.hpp"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace laqg::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// JSON configuration files

/// Reads a JSON object as CLI11 config items. Nested objects name
/// subcommand sections; top-level scalars apply to `default_section`.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string default_section) : default_section_(std::move(default_section)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        for (const auto& [k, v] : value.items()) items.push_back(item({key}, k, v));
      } else {
        std::vector<std::string> parents;
        if (!default_section_.empty()) parents.push_back(default_section_);
        items.push_back(item(parents, key, value));
      }
    }
    return items;
  }

 private:
  static CLI::ConfigItem item(std::vector<std::string> parents, const std::string& name, const json& v) {
    CLI::ConfigItem it;
    it.parents = std::move(parents);
    it.name = name;
    auto text = [](const json& e) { return e.is_string() ? e.get<std::string>() : e.dump(); };
    if (v.is_array()) {
      for (const auto& e : v) it.inputs.push_back(text(e));
    } else {
      it.inputs.push_back(text(v));
    }
    return it;
  }

  std::string default_section_;
};

// ---------------------------------------------------------------------------
// Shared helpers

std::string joined(const data::Tokens& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? " " : "") + t[i];
  return s;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    open_out(out_path) << text;
    spdlog::info("wrote {}", out_path);
  }
}

ordered_json stats_json(std::span<const data::Example> examples) {
  if (examples.empty()) return {{"examples", 0}};
  const data::CorpusStats s = data::corpus_stats(examples);
  return {{"examples", s.example_count}, {"mean_sentences", s.mean_sentences}, {"mean_words", s.mean_words}};
}

ordered_json ingest_json(const data::IngestStats& s) {
  return {{"records", s.records},
          {"retained", s.retained},
          {"malformed", s.malformed},
          {"no_long_answer", s.no_long_answer},
          {"not_paragraph", s.not_paragraph},
          {"empty_question", s.empty_question},
          {"empty_answer", s.empty_answer},
          {"multi_annotation", s.multi_annotation}};
}

std::string manifest_string(const json& m, const char* key) {
  return m.contains(key) && m[key].is_string() ? m[key].get<std::string>() : std::string();
}

// ---------------------------------------------------------------------------
// prepare-data

struct PrepareOptions {
  std::string input, test_input, out, format = "nq", secondary = "none", source = "answer";
  std::uint64_t split_seed = 1;
  double ratio = 0.9;
  std::size_t vocab_size = 50000;
};

std::vector<data::Example> load_examples(const std::string& path, const std::string& format,
                                         ordered_json* ingest_stats) {
  if (format == "pairs") return data::read_dataset(path);
  data::IngestResult r = data::ingest_nq(fs::path(path));
  spdlog::info("{}: {} of {} records retained", path, r.stats.retained, r.stats.records);
  if (ingest_stats) *ingest_stats = ingest_json(r.stats);
  return std::move(r.examples);
}

void attach(std::vector<data::Example>& examples, const PrepareOptions& o) {
  if (o.secondary == "none") return;
  if (o.secondary == "first-sentence") {
    data::attach_secondary(examples, data::SecondarySource::kFirstSentence);
    return;
  }
  const std::string file = o.secondary.substr(std::string("summary=").size());
  const std::size_t fallbacks = data::attach_secondary(examples, data::SecondarySource::kSummaryFile, file);
  if (fallbacks) spdlog::warn("{} example(s) had no summary and use their first sentence", fallbacks);
}

void prepare_data(const PrepareOptions& o) {
  if (o.source == "secondary-only" && o.secondary == "none") {
    throw ConfigError("--source secondary-only needs --secondary first-sentence or summary=FILE");
  }
  ordered_json ingest = json::object();
  std::vector<data::Example> examples = load_examples(o.input, o.format, &ingest);
  attach(examples, o);
  if (o.source == "secondary-only") data::use_secondary_as_source(examples);
  if (examples.size() < 2) throw DataError(fmt::format("{} usable example(s); need at least 2 to split", examples.size()));
  auto [train, valid] = data::split(std::move(examples), o.ratio, o.split_seed);
  if (train.empty()) throw DataError("the split leaves no training examples; raise --ratio");

  std::vector<data::Example> test;
  ordered_json test_ingest = nullptr;
  if (!o.test_input.empty()) {
    test = load_examples(o.test_input, o.format, &test_ingest);
    attach(test, o);
    if (o.source == "secondary-only") data::use_secondary_as_source(test);
  }

  const data::Vocab vocab = data::build_vocab(train, o.vocab_size);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  data::write_dataset(dir / "train.jsonl", train);
  data::write_dataset(dir / "valid.jsonl", valid);
  if (!o.test_input.empty()) data::write_dataset(dir / "test.jsonl", test);
  vocab.save(dir / "vocab.txt");

  ordered_json stats;
  stats["ingest"] = ingest;
  if (!test_ingest.is_null()) stats["test_ingest"] = test_ingest;
  stats["train"] = stats_json(train);
  stats["valid"] = stats_json(valid);
  if (!o.test_input.empty()) stats["test"] = stats_json(test);
  write_json(dir / "stats.json", stats);

  ordered_json m = new_manifest("prepare-data");
  m["inputs"] = {{"input", o.input}, {"test_input", o.test_input}, {"format", o.format}};
  m["split_seed"] = o.split_seed;
  m["ratio"] = o.ratio;
  m["secondary"] = o.secondary;
  m["source"] = o.source;
  m["vocab_size"] = vocab.size();
  m["vocab_hash"] = vocab.hash();
  m["counts"] = {{"train", train.size()}, {"valid", valid.size()}, {"test", test.size()}};
  seal_manifest(m);
  write_json(dir / "manifest.json", m);
  spdlog::info("prepared {} train / {} valid / {} test examples in {} (vocab {} tokens, hash {})", train.size(),
               valid.size(), test.size(), dir.string(), vocab.size(), vocab.hash());
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::string data, out, arch = "default", family = "transformer";
  std::optional<std::size_t> enc_layers, dec_layers, heads, d_model, d_ffn, max_src_len, max_tgt_len;
  std::optional<double> dropout;
  std::optional<std::string> combine, positions;
  bool tie_embeddings = false;
  std::size_t epochs = 10, batch_size = 32;
  double lr = 0.0005, clip_norm = 0.0;
  std::optional<double> stop_below;
  std::uint64_t seed = 1;
  bool no_shuffle = false;
  bool plan_only = false;
};

data::Vocab load_prepared_vocab(const fs::path& dir) {
  data::Vocab vocab = data::Vocab::load(dir / "vocab.txt");
  if (fs::exists(dir / "manifest.json")) {
    const json m = read_json(dir / "manifest.json");
    require_same_vocab(manifest_string(m, "vocab_hash"), vocab.hash(), (dir / "vocab.txt").string());
  }
  return vocab;
}

models::ModelConfig model_config(const TrainOptions& o, std::size_t vocab_size) {
  models::ModelConfig c = models::preset(o.arch);
  c.family = models::parse_family(o.family);
  if (o.enc_layers) c.enc_layers = *o.enc_layers;
  if (o.dec_layers) c.dec_layers = *o.dec_layers;
  if (o.heads) c.heads = *o.heads;
  if (o.d_model) c.d_model = *o.d_model;
  if (o.d_ffn) c.d_ffn = *o.d_ffn;
  if (o.dropout) c.dropout = *o.dropout;
  if (o.max_src_len) c.max_src_len = *o.max_src_len;
  if (o.max_tgt_len) c.max_tgt_len = *o.max_tgt_len;
  if (o.combine) c.combine = models::parse_combine(*o.combine);
  if (o.positions) {
    if (*o.positions == "sinusoidal") {
      c.positions = models::Positions::kSinusoidal;
    } else if (*o.positions == "learned") {
      c.positions = models::Positions::kLearned;
    } else {
      throw ConfigError("unknown positions '" + *o.positions + "' (sinusoidal, learned)");
    }
  }
  c.tie_embeddings = o.tie_embeddings;
  c.vocab_size = vocab_size;
  c.validate();
  return c;
}

void train_command(const TrainOptions& o) {
  const fs::path data_dir(o.data);
  const data::Vocab vocab = load_prepared_vocab(data_dir);
  // Surface configuration problems before any data is touched.
  const models::ModelConfig config = model_config(o, vocab.size());
  if (o.epochs == 0 || o.batch_size == 0) throw ConfigError("--epochs and --batch-size must be positive");
  if (!(o.lr > 0.0)) throw ConfigError("--lr must be positive");
  const fs::path out(o.out);
  if (o.plan_only) {
    ordered_json m = new_manifest("train");
    m["planned"] = true;
    m["model_config"] = models::to_json(config);
    m["arch"] = o.arch;
    m["data"] = {{"dir", o.data}};
    m["vocab_hash"] = vocab.hash();
    m["training"] = {{"epochs", o.epochs}, {"batch_size", o.batch_size}, {"lr", o.lr}, {"clip_norm", o.clip_norm}};
    m["seeds"] = {{"model", o.seed}, {"shuffle", o.seed}};
    seal_manifest(m);
    fs::create_directories(out);
    write_json(out / "manifest.json", m);
    spdlog::info("configuration resolved; manifest written to {}", (out / "manifest.json").string());
    return;
  }

  const auto train_set = data::read_dataset(data_dir / "train.jsonl");
  std::vector<models::PreparedExample> prepared;
  for (const auto& ex : train_set) prepared.push_back(models::prepare_example(ex, vocab, config));
  std::vector<models::PreparedExample> valid_prepared;
  if (fs::exists(data_dir / "valid.jsonl")) {
    for (const auto& ex : data::read_dataset(data_dir / "valid.jsonl"))
      valid_prepared.push_back(models::prepare_example(ex, vocab, config));
  }

  models::TrainConfig tc;
  tc.epochs = o.epochs;
  tc.batch_size = o.batch_size;
  tc.adam.lr = o.lr;
  tc.clip_norm = o.clip_norm;
  tc.seed = o.seed;
  tc.shuffle = !o.no_shuffle;
  tc.stop_below = o.stop_below;

  fs::create_directories(out);
  auto model = models::build_model(config, o.seed);
  std::ofstream log = open_out(out / "train_log.jsonl");
  spdlog::info("training {} ({} parameter tensors) on {} examples for up to {} epochs", o.family,
               model->params().size(), prepared.size(), o.epochs);
  models::TrainResult result = models::train(*model, prepared, tc, [&](const models::EpochRecord& r) {
    log << json{{"epoch", r.epoch}, {"mean_loss", r.mean_loss}, {"perplexity", std::exp(r.mean_loss)},
                {"seconds", r.seconds}}
               .dump()
        << '\n';
    log.flush();
    spdlog::info("epoch {:>4}  loss {:.5f}  perplexity {:.4f}  ({:.2f}s)", r.epoch, r.mean_loss,
                 std::exp(r.mean_loss), r.seconds);
  });
  const double train_ppl = std::exp(models::mean_token_loss(*model, prepared));
  std::optional<double> valid_ppl;
  if (!valid_prepared.empty()) valid_ppl = std::exp(models::mean_token_loss(*model, valid_prepared));
  log << json{{"final", true}, {"train_perplexity", train_ppl},
              {"valid_perplexity", valid_ppl ? json(*valid_ppl) : json(nullptr)}}
             .dump()
      << '\n';
  spdlog::info("final train perplexity {:.4f}{}", train_ppl,
               valid_ppl ? fmt::format(", valid perplexity {:.4f}", *valid_ppl) : std::string());

  ordered_json m = new_manifest("train");
  m["model_config"] = models::to_json(config);
  m["arch"] = o.arch;
  m["data"] = {{"dir", o.data}, {"train_examples", prepared.size()}};
  if (auto dm = sibling_manifest(data_dir / "train.jsonl")) m["data"]["run_id"] = manifest_string(*dm, "run_id");
  m["vocab_hash"] = vocab.hash();
  m["training"] = {{"epochs", o.epochs}, {"epochs_run", result.log.size()}, {"batch_size", o.batch_size},
                   {"lr", o.lr},         {"clip_norm", o.clip_norm},       {"shuffle", !o.no_shuffle},
                   {"stop_below", o.stop_below ? json(*o.stop_below) : json(nullptr)}};
  m["seeds"] = {{"model", o.seed}, {"shuffle", o.seed}};
  m["train_perplexity"] = train_ppl;
  seal_manifest(m);
  write_json(out / "manifest.json", m);
  vocab.save(out / "vocab.txt");
  // The checkpoint carries the manifest minus its timestamp so identical
  // runs produce identical bytes.
  ordered_json header_manifest = m;
  header_manifest.erase("created");
  ad::save_checkpoint(out / "model.ckpt", json{{"manifest", header_manifest}}.dump(), model->params());
  spdlog::info("checkpoint written to {}", (out / "model.ckpt").string());
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  std::string checkpoint, data, out;
  std::size_t beam = 5, threads = 1, limit = 0;
  std::optional<std::size_t> max_len;
  double length_penalty = 0.0;
};

struct LoadedModel {
  std::unique_ptr<models::Model> model;
  data::Vocab vocab;
  json manifest;
};

LoadedModel load_model(const fs::path& checkpoint) {
  const fs::path file = fs::is_directory(checkpoint) ? checkpoint / "model.ckpt" : checkpoint;
  const ad::Checkpoint ckpt = ad::read_checkpoint(file);
  json header;
  try {
    header = json::parse(ckpt.header_json);
  } catch (const json::exception& e) {
    throw DataError(file.string() + ": unreadable checkpoint header: " + e.what());
  }
  if (!header.contains("manifest")) throw DataError(file.string() + ": checkpoint carries no manifest");
  LoadedModel lm;
  lm.manifest = header["manifest"];
  lm.vocab = data::Vocab::load(file.parent_path() / "vocab.txt");
  require_same_vocab(manifest_string(lm.manifest, "vocab_hash"), lm.vocab.hash(),
                     (file.parent_path() / "vocab.txt").string());
  const models::ModelConfig config = models::config_from_json(lm.manifest.at("model_config"));
  lm.model = models::build_model(config, lm.manifest.at("seeds").at("model").get<std::uint64_t>());
  ad::load_parameters(ckpt, lm.model->params());
  return lm;
}

void generate_command(const GenerateOptions& o) {
  if (o.beam == 0) throw ConfigError("--beam must be at least 1");
  if (o.threads == 0) throw ConfigError("--threads must be at least 1");
  LoadedModel lm = load_model(o.checkpoint);
  if (auto dm = sibling_manifest(o.data); dm && dm->contains("vocab_hash")) {
    require_same_vocab(manifest_string(lm.manifest, "vocab_hash"), manifest_string(*dm, "vocab_hash"), o.data);
  } else {
    spdlog::warn("{} has no manifest; vocabulary consistency not checked", o.data);
  }
  auto examples = data::read_dataset(o.data);
  if (o.limit && examples.size() > o.limit) examples.resize(o.limit);
  const models::ModelConfig& config = lm.model->config();
  decoding::DecodeOptions opts;
  opts.beam_width = o.beam;
  opts.length_penalty = o.length_penalty;
  opts.max_len = o.max_len.value_or(config.max_tgt_len);

  struct Output {
    std::string text;
    double log_prob = 0.0;
  };
  std::vector<Output> outputs(examples.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < examples.size() && !failed; i = next++) {
      try {
        const models::SourceInput src = models::prepare_source(examples[i], lm.vocab, config);
        const decoding::Hypothesis h = decoding::decode(*lm.model, src, opts);
        outputs[i] = {decoding::render(h.tokens, src, lm.vocab), h.log_prob};
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failed.exchange(true)) failure = fmt::format("example {}: {}", examples[i].id, e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < o.threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failed) throw Error("decoding failed on " + failure);

  ordered_json m = new_manifest("generate");
  m["model_run_id"] = manifest_string(lm.manifest, "run_id");
  m["model_config"] = lm.manifest.at("model_config");
  m["vocab_hash"] = lm.vocab.hash();
  m["data"] = o.data;
  m["decoding"] = {{"beam", o.beam}, {"length_penalty", o.length_penalty}, {"max_len", opts.max_len}};
  m["examples"] = examples.size();
  seal_manifest(m);
  std::ofstream out = open_out(o.out);
  const std::string run_id = m["run_id"];
  for (std::size_t i = 0; i < examples.size(); ++i) {
    out << ordered_json{{"id", examples[i].id},
                        {"hypothesis", outputs[i].text},
                        {"log_prob", outputs[i].log_prob},
                        {"run_id", run_id}}
               .dump()
        << '\n';
  }
  write_json(manifest_path_for(o.out), m);
  spdlog::info("decoded {} examples (beam {}) into {}", examples.size(), o.beam, o.out);
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
  std::string gen, refs, out;
  double bleu_epsilon = 0.0, rouge_beta = 1.0;
};

std::map<std::string, data::Tokens> read_generations(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read generations " + path.string());
  std::map<std::string, data::Tokens> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string id = j.at("id").get<std::string>();
      if (!out.emplace(id, data::tokenize(j.at("hypothesis").get<std::string>())).second) {
        throw DataError(fmt::format("{}:{}: duplicate id {}", path.string(), lineno, id));
      }
    } catch (const json::exception& e) {
      throw DataError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  if (out.empty()) throw DataError(path.string() + ": no generations");
  return out;
}

void evaluate_command(const EvaluateOptions& o) {
  const auto generations = read_generations(o.gen);
  const auto refs = data::read_dataset(o.refs);
  const auto records = bench::join_results(generations, refs);
  if (records.size() != generations.size()) throw DataError("generations and references do not line up");
  std::map<std::string, const data::Example*> by_id;
  for (const auto& ex : refs) by_id[ex.id] = &ex;

  metrics::MetricOptions mo;
  mo.bleu.epsilon = o.bleu_epsilon;
  mo.rouge_beta = o.rouge_beta;
  std::vector<data::Tokens> hyps, gold;
  for (const auto& r : records) {
    hyps.push_back(r.hypothesis);
    gold.push_back(r.reference);
  }
  const metrics::MetricReport report = metrics::evaluate_corpus(hyps, gold, mo);

  ordered_json m = new_manifest("evaluate");
  m["generations"] = o.gen;
  m["references"] = o.refs;
  if (auto gm = sibling_manifest(o.gen)) {
    m["generation_run_id"] = manifest_string(*gm, "run_id");
    if (gm->contains("model_config")) m["model"] = (*gm)["model_config"].value("family", "");
  }
  m["options"] = {{"bleu_epsilon", o.bleu_epsilon}, {"rouge_beta", o.rouge_beta}};
  seal_manifest(m);

  ordered_json out;
  out["manifest"] = m;
  out["metrics"] = metrics::to_json(report);
  out["note"] = metrics::kMeteorNote;
  out["records"] = json::array();
  for (const auto& r : records) {
    out["records"].push_back({{"id", r.id},
                              {"hypothesis", joined(r.hypothesis)},
                              {"reference", joined(r.reference)},
                              {"answer", joined(by_id.at(r.id)->answer)},
                              {"answer_words", r.answer_words},
                              {"answer_sentences", r.answer_sentences}});
  }
  write_json(o.out, out);
  std::cout << metrics::format_table({{fs::path(o.gen).stem().string(), report}}, "Run");
}

struct EvalFile {
  json manifest;
  std::vector<bench::ResultRecord> records;
  std::map<std::string, std::string> answers;
};

EvalFile read_eval(const fs::path& path) {
  const json j = read_json(path);
  EvalFile e;
  try {
    e.manifest = j.at("manifest");
    for (const auto& r : j.at("records")) {
      bench::ResultRecord rec{r.at("id").get<std::string>(), data::tokenize(r.at("hypothesis").get<std::string>()),
                              data::tokenize(r.at("reference").get<std::string>()),
                              r.at("answer_words").get<std::size_t>(), r.at("answer_sentences").get<std::size_t>()};
      e.answers[rec.id] = r.value("answer", std::string());
      e.records.push_back(std::move(rec));
    }
  } catch (const json::exception& ex) {
    throw DataError(path.string() + ": not an evaluation file: " + ex.what());
  }
  return e;
}

// ---------------------------------------------------------------------------
// bin-report and compare

struct BinOptions {
  std::string by = "sentences", format = "text", out;
  std::size_t width = 50, bins = 3, cap = 6;
};

bench::BinKind bin_kind(const std::string& by) { return by == "words" ? bench::BinKind::kWords : bench::BinKind::kSentences; }

void bin_report_command(const std::string& eval_path, const BinOptions& o) {
  const EvalFile e = read_eval(eval_path);
  const bench::BinnedReport r = o.by == "words" ? bench::bin_by_words(e.records, o.width, o.bins)
                                                : bench::bin_by_sentences(e.records, o.cap);
  if (o.format == "json") {
    ordered_json j = bench::to_json(r);
    j["evaluation_run_id"] = manifest_string(e.manifest, "run_id");
    emit(j.dump(2) + "\n", o.out);
  } else if (o.format == "csv") {
    emit(bench::to_csv(r), o.out);
  } else {
    emit(bench::render_table(r), o.out);
  }
}

struct CompareOptions {
  std::string a, b, name_a, name_b, metric = "BLEU-4";
  BinOptions bins;
};

std::string run_name(const EvalFile& e, const std::string& path) {
  const std::string model = manifest_string(e.manifest, "model");
  return model.empty() ? fs::path(path).stem().string() : model;
}

void compare_command(const CompareOptions& o) {
  const EvalFile a = read_eval(o.a);
  const EvalFile b = read_eval(o.b);
  std::map<std::string, const bench::ResultRecord*> ref_b;
  for (const auto& r : b.records) ref_b[r.id] = &r;
  for (const auto& r : a.records) {
    auto it = ref_b.find(r.id);
    if (it != ref_b.end() && it->second->reference != r.reference) {
      throw DataError("runs were scored against different references (example " + r.id + ")");
    }
  }
  std::string name_a = o.name_a.empty() ? run_name(a, o.a) : o.name_a;
  std::string name_b = o.name_b.empty() ? run_name(b, o.b) : o.name_b;
  if (name_a == name_b) {
    name_a += " (a)";
    name_b += " (b)";
  }
  const auto columns = metrics::MetricReport::columns();
  const auto col = std::find(columns.begin(), columns.end(), o.metric);
  if (col == columns.end()) throw ConfigError("unknown metric '" + o.metric + "'");
  const bench::BinKind kind = bin_kind(o.bins.by);
  const std::size_t param = kind == bench::BinKind::kWords ? o.bins.width : o.bins.cap;
  const bench::RunComparison c = bench::compare_runs(a.records, b.records, name_a, name_b, kind, param);
  if (o.bins.format == "json") {
    emit(bench::to_json(c).dump(2) + "\n", o.bins.out);
  } else if (o.bins.format == "csv") {
    emit(bench::to_csv(c), o.bins.out);
  } else {
    std::string text = metrics::format_table({{name_a, c.overall_a}, {name_b, c.overall_b}}, "Run");
    text += "\n" + bench::render_comparison(c, static_cast<std::size_t>(col - columns.begin()));
    text += "\nDeltas (" + name_a + " - " + name_b + ")\n" + bench::render_deltas(c);
    emit(text, o.bins.out);
  }
}

// ---------------------------------------------------------------------------
// serve-anneval

struct ServeOptions {
  std::string host = "127.0.0.1", data_dir, ui, create_study;
  int port = 8080;
  std::vector<std::string> runs;
  std::size_t items = 100, min_annotators = 2, sentence_cap = 6;
  std::uint64_t seed = 1;
  bool create_only = false;
};

anneval::AnnevalServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

void serve_command(const ServeOptions& o) {
  std::optional<fs::path> ui;
  if (!o.ui.empty()) ui = o.ui;
  anneval::AnnevalServer server(o.data_dir, ui);
  if (!o.create_study.empty()) {
    if (o.runs.empty()) throw ConfigError("--create-study needs at least one --run TAG=EVAL_FILE");
    std::vector<anneval::GenerationRun> runs;
    std::map<std::string, anneval::Candidate> candidates;
    for (const auto& spec : o.runs) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--run expects TAG=EVAL_FILE, got '" + spec + "'");
      const EvalFile e = read_eval(spec.substr(eq + 1));
      anneval::GenerationRun run{spec.substr(0, eq), {}};
      for (const auto& r : e.records) {
        run.questions[r.id] = data::detokenize(r.hypothesis);
        candidates.emplace(r.id, anneval::Candidate{r.id, e.answers.at(r.id), r.answer_sentences});
      }
      runs.push_back(std::move(run));
    }
    std::vector<anneval::Candidate> pool;
    for (auto& [_, c] : candidates) pool.push_back(c);
    anneval::StudyConfig sc;
    sc.n_items = o.items;
    sc.seed = o.seed;
    sc.min_annotators = o.min_annotators;
    sc.sentence_cap = o.sentence_cap;
    anneval::Study& s = server.store().create(o.create_study, sc, runs, pool);
    spdlog::info("created study '{}' with {} items", s.id(), s.items().size());
  }
  if (o.create_only) return;
  const int port = server.bind(o.host, o.port);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  spdlog::info("annotation service listening on http://{}:{} (studies under {})", o.host, port, o.data_dir);
  server.listen();
  g_server = nullptr;
}

int exit_code_for_parse(const CLI::ParseError& e, CLI::App& app) {
  const int code = app.exit(e);
  return code == 0 ? kExitOk : kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& raw_args) {
  static const std::vector<std::string> kCommands = {"prepare-data", "train",   "generate",     "evaluate",
                                                     "bin-report",   "compare", "serve-anneval"};
  // --config is a top-level flag; accept it anywhere by moving it forward.
  std::vector<std::string> args = raw_args.empty() ? std::vector<std::string>{"laqg"} : raw_args;
  std::string section;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (std::find(kCommands.begin(), kCommands.end(), args[i]) != kCommands.end()) {
      section = args[i];
      break;
    }
  }
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      const std::string value = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      args.insert(args.begin() + 1, {"--config", value});
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      const std::string flag = args[i];
      args.erase(args.begin() + static_cast<long>(i));
      args.insert(args.begin() + 1, flag);
      break;
    }
  }

  CLI::App app("Long-answer question generation benchmark toolkit", "laqg");
  app.config_formatter(std::make_shared<JsonConfig>(section));
  app.set_config("--config", "", "JSON file supplying flags (flat or per-subcommand sections)");
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_version_flag("--version", std::string(kToolVersion));
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  PrepareOptions prep;
  auto* p = app.add_subcommand("prepare-data", "Ingest NQ-format records into train/valid/test datasets");
  p->add_option("--input", prep.input, "Simplified NQ JSONL (or pairs JSONL with --format pairs)")
      ->required()
      ->check(CLI::ExistingFile);
  p->add_option("--test-input", prep.test_input, "Held-out source (the original dev set) for test.jsonl")
      ->check(CLI::ExistingFile);
  p->add_option("--out", prep.out, "Output directory")->required();
  p->add_option("--format", prep.format, "Input format")->check(CLI::IsMember({"nq", "pairs"}))->capture_default_str();
  p->add_option("--split-seed", prep.split_seed, "Seed of the train/valid shuffle")->capture_default_str();
  p->add_option("--ratio", prep.ratio, "Training fraction")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  p->add_option("--secondary", prep.secondary, "none | first-sentence | summary=FILE")
      ->check([](const std::string& s) -> std::string {
        if (s == "none" || s == "first-sentence") return {};
        if (s.rfind("summary=", 0) == 0 && s.size() > 8) return {};
        return "expected none, first-sentence or summary=FILE";
      })
      ->capture_default_str();
  p->add_option("--source", prep.source, "Model input: the answer, or the secondary input only")
      ->check(CLI::IsMember({"answer", "secondary-only"}))
      ->capture_default_str();
  p->add_option("--vocab-size", prep.vocab_size, "Maximum non-reserved vocabulary entries")->capture_default_str();

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train a question generation model");
  t->add_option("--data", tr.data, "Directory written by prepare-data")->required()->check(CLI::ExistingDirectory);
  t->add_option("--out", tr.out, "Output directory for checkpoint, manifest and loss log")->required();
  t->add_option("--arch", tr.arch, "Architecture preset")
      ->check(CLI::IsMember(models::preset_names()))
      ->capture_default_str();
  t->add_option("--family", tr.family,
                "lstm-attn | lstm-copy | lstm-maxout | transformer | transformer-copy | multi-source-transformer")
      ->capture_default_str();
  t->add_option("--enc-layers", tr.enc_layers);
  t->add_option("--dec-layers", tr.dec_layers);
  t->add_option("--heads", tr.heads);
  t->add_option("--d-model", tr.d_model);
  t->add_option("--d-ffn", tr.d_ffn);
  t->add_option("--dropout", tr.dropout);
  t->add_option("--max-src-len", tr.max_src_len);
  t->add_option("--max-tgt-len", tr.max_tgt_len, "Includes the end-of-sequence token");
  t->add_option("--combine", tr.combine, "Multi-source combination: parallel | serial");
  t->add_option("--positions", tr.positions, "sinusoidal | learned");
  t->add_flag("--tie-embeddings", tr.tie_embeddings);
  t->add_option("--epochs", tr.epochs)->capture_default_str();
  t->add_option("--batch-size", tr.batch_size)->capture_default_str();
  t->add_option("--lr", tr.lr)->capture_default_str();
  t->add_option("--clip-norm", tr.clip_norm, "Global gradient norm clip, 0 disables")->capture_default_str();
  t->add_option("--stop-below", tr.stop_below, "Stop once an epoch's mean token loss is below this");
  t->add_option("--seed", tr.seed, "Seed for initialization and shuffling")->capture_default_str();
  t->add_flag("--no-shuffle", tr.no_shuffle);
  t->add_flag("--plan-only", tr.plan_only, "Resolve the configuration and write the manifest without training");

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Decode questions with a trained checkpoint");
  g->add_option("--checkpoint", gen.checkpoint, "Checkpoint file or training output directory")
      ->required()
      ->check(CLI::ExistingPath);
  g->add_option("--data", gen.data, "Dataset JSONL to decode")->required()->check(CLI::ExistingFile);
  g->add_option("--out", gen.out, "Generations JSONL")->required();
  g->add_option("--beam", gen.beam, "Beam width (1 = greedy)")->capture_default_str();
  g->add_option("--length-penalty", gen.length_penalty)->capture_default_str();
  g->add_option("--max-len", gen.max_len, "Defaults to the model's max target length");
  g->add_option("--threads", gen.threads, "Decode examples concurrently")->capture_default_str();
  g->add_option("--limit", gen.limit, "Decode only the first N examples (0 = all)")->capture_default_str();

  EvaluateOptions ev;
  auto* e = app.add_subcommand("evaluate", "Score generations with BLEU-1..4, METEOR-lite and ROUGE-L");
  e->add_option("--gen", ev.gen, "Generations JSONL")->required()->check(CLI::ExistingFile);
  e->add_option("--refs", ev.refs, "Dataset JSONL holding the reference questions")->required()->check(CLI::ExistingFile);
  e->add_option("--out", ev.out, "Evaluation JSON")->required();
  e->add_option("--bleu-epsilon", ev.bleu_epsilon, "Additive smoothing of zero n-gram counts")->capture_default_str();
  e->add_option("--rouge-beta", ev.rouge_beta)->capture_default_str();

  std::string eval_path;
  BinOptions bins;
  auto* b = app.add_subcommand("bin-report", "Metrics grouped by answer length");
  b->add_option("--eval", eval_path, "Evaluation JSON")->required()->check(CLI::ExistingFile);
  auto bin_flags = [](CLI::App* sub, BinOptions& o) {
    sub->add_option("--by", o.by)->check(CLI::IsMember({"sentences", "words"}))->capture_default_str();
    sub->add_option("--width", o.width, "Word bin width")->capture_default_str();
    sub->add_option("--bins", o.bins, "Number of word bins, the last open-ended")->capture_default_str();
    sub->add_option("--cap", o.cap, "Sentence count collecting all longer answers")->capture_default_str();
    sub->add_option("--format", o.format)->check(CLI::IsMember({"text", "json", "csv"}))->capture_default_str();
    sub->add_option("--out", o.out, "Write here instead of stdout");
  };
  bin_flags(b, bins);

  CompareOptions cmp;
  cmp.bins.by = "words";
  auto* c = app.add_subcommand("compare", "Side-by-side metrics of two evaluated runs");
  c->add_option("--a", cmp.a, "First evaluation JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--b", cmp.b, "Second evaluation JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--name-a", cmp.name_a);
  c->add_option("--name-b", cmp.name_b);
  c->add_option("--metric", cmp.metric, "Metric shown in the length table")->capture_default_str();
  bin_flags(c, cmp.bins);

  ServeOptions sv;
  auto* s = app.add_subcommand("serve-anneval", "Run the human evaluation service");
  s->add_option("--data-dir", sv.data_dir, "Directory of study ledgers")->required();
  s->add_option("--port", sv.port)->capture_default_str();
  s->add_option("--host", sv.host)->capture_default_str();
  s->add_option("--ui", sv.ui, "Static annotation UI bundle to serve at /")->check(CLI::ExistingDirectory);
  s->add_option("--create-study", sv.create_study, "Create this study before serving");
  s->add_option("--run", sv.runs, "TAG=EVAL_FILE per model in the new study");
  s->add_option("--items", sv.items)->capture_default_str();
  s->add_option("--seed", sv.seed)->capture_default_str();
  s->add_option("--min-annotators", sv.min_annotators)->capture_default_str();
  s->add_option("--sentence-cap", sv.sentence_cap)->capture_default_str();
  s->add_flag("--create-only", sv.create_only, "Exit after creating the study");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& err) {
    return exit_code_for_parse(err, app);
  }

  auto logger = spdlog::get("laqg");
  if (!logger) logger = spdlog::stderr_color_mt("laqg");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_level(quiet ? spdlog::level::warn : verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*p) prepare_data(prep);
    if (*t) train_command(tr);
    if (*g) generate_command(gen);
    if (*e) evaluate_command(ev);
    if (*b) bin_report_command(eval_path, bins);
    if (*c) compare_command(cmp);
    if (*s) serve_command(sv);
  } catch (const ConfigError& err) {
    spdlog::error("{}", err.what());
    return kExitUsage;
  } catch (const DataError& err) {
    spdlog::error("{}", err.what());
    return kExitData;
  } catch (const IoError& err) {
    spdlog::error("{}", err.what());
    return kExitData;
  } catch (const anneval::ConflictError& err) {
    spdlog::error("{}", err.what());
    return kExitData;
  } catch (const std::exception& err) {
    spdlog::error("internal error: {}", err.what());
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace laqg::cli
