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

#include "laqg/data/example.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <random>

#include "json.hpp"
#include "laqg/error.hpp"

namespace laqg::data {

using nlohmann::json;

Example make_example(std::string id, Tokens answer, Tokens question,
                     std::optional<Tokens> secondary) {
  if (answer.empty()) throw DataError("example " + id + " has an empty answer");
  if (question.empty()) throw DataError("example " + id + " has an empty question");
  Example ex;
  ex.id = std::move(id);
  ex.answer_sentences = split_sentences(answer).size();
  ex.answer_words = count_words(answer);
  ex.answer = std::move(answer);
  ex.question = std::move(question);
  ex.secondary = std::move(secondary);
  return ex;
}

CorpusStats corpus_stats(std::span<const Example> examples) {
  if (examples.empty()) throw ContractError("corpus_stats: no examples");
  CorpusStats s;
  s.example_count = examples.size();
  double sentences = 0.0, words = 0.0;
  for (const auto& ex : examples) {
    sentences += static_cast<double>(ex.answer_sentences);
    words += static_cast<double>(ex.answer_words);
  }
  s.mean_sentences = sentences / static_cast<double>(examples.size());
  s.mean_words = words / static_cast<double>(examples.size());
  return s;
}

std::pair<std::vector<Example>, std::vector<Example>> split(std::vector<Example> examples,
                                                            double ratio, std::uint64_t seed) {
  if (examples.empty()) throw ContractError("split: no examples");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  for (std::size_t i = examples.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(examples[i], examples[j]);
  }
  const auto head = static_cast<std::size_t>(static_cast<double>(examples.size()) * ratio);
  std::vector<Example> rest(std::make_move_iterator(examples.begin() + static_cast<std::ptrdiff_t>(head)),
                            std::make_move_iterator(examples.end()));
  examples.resize(head);
  return {std::move(examples), std::move(rest)};
}

std::size_t attach_secondary(std::vector<Example>& examples, SecondarySource source,
                             const std::filesystem::path& summary_file) {
  if (source == SecondarySource::kNone) {
    for (auto& ex : examples) ex.secondary.reset();
    return 0;
  }
  std::map<std::string, Tokens> summaries;
  if (source == SecondarySource::kSummaryFile) {
    std::ifstream in(summary_file);
    if (!in) throw IoError("cannot read summary file " + summary_file.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw DataError(summary_file.string() + ":" + std::to_string(lineno) +
                        ": expected <id><TAB><summary>");
      }
      summaries[line.substr(0, tab)] = tokenize(line.substr(tab + 1));
    }
  }
  std::size_t fallbacks = 0;
  for (auto& ex : examples) {
    if (source == SecondarySource::kSummaryFile) {
      auto it = summaries.find(ex.id);
      if (it != summaries.end() && !it->second.empty()) {
        ex.secondary = it->second;
        continue;
      }
      ++fallbacks;
      std::cerr << "warning: no summary for example " << ex.id << ", using its first sentence\n";
    }
    ex.secondary = first_sentence(ex.answer);
  }
  return fallbacks;
}

void use_secondary_as_source(std::vector<Example>& examples) {
  for (auto& ex : examples) {
    if (!ex.secondary || ex.secondary->empty()) {
      throw ContractError("example " + ex.id + " has no secondary input to use as source");
    }
    ex.answer = *ex.secondary;
  }
}

void write_dataset(const std::filesystem::path& path, std::span<const Example> examples) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset " + path.string());
  for (const auto& ex : examples) {
    json j = {{"id", ex.id},
              {"answer", detokenize(ex.answer)},
              {"question", detokenize(ex.question)},
              {"secondary", ex.secondary ? json(detokenize(*ex.secondary)) : json(nullptr)},
              {"answer_sentences", ex.answer_sentences},
              {"answer_words", ex.answer_words}};
    out << j.dump() << '\n';
  }
}

std::vector<Example> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read dataset " + path.string());
  std::vector<Example> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      std::optional<Tokens> secondary;
      if (j.contains("secondary") && !j["secondary"].is_null()) {
        secondary = tokenize(j["secondary"].get<std::string>());
      }
      Example ex = make_example(j.at("id").get<std::string>(),
                                tokenize(j.at("answer").get<std::string>()),
                                tokenize(j.at("question").get<std::string>()), std::move(secondary));
      if (j.contains("answer_sentences")) ex.answer_sentences = j["answer_sentences"].get<std::size_t>();
      if (j.contains("answer_words")) ex.answer_words = j["answer_words"].get<std::size_t>();
      out.push_back(std::move(ex));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace laqg::data
