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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "laqg/data/text.hpp"

namespace laqg::data {

/// One (long answer, question, optional secondary input) record.
struct Example {
  std::string id;
  Tokens answer;
  Tokens question;
  std::optional<Tokens> secondary;
  std::size_t answer_sentences = 0;
  std::size_t answer_words = 0;
};

/// Builds an example from already tokenized fields and fills the counts.
/// Empty answers or questions are a DataError.
Example make_example(std::string id, Tokens answer, Tokens question,
                     std::optional<Tokens> secondary = std::nullopt);

struct CorpusStats {
  std::size_t example_count = 0;
  double mean_sentences = 0.0;
  double mean_words = 0.0;
};

CorpusStats corpus_stats(std::span<const Example> examples);

/// Seeded Fisher-Yates shuffle, then the first floor(n * ratio) examples
/// form the first part.
std::pair<std::vector<Example>, std::vector<Example>> split(std::vector<Example> examples,
                                                            double ratio, std::uint64_t seed);

enum class SecondarySource { kNone, kFirstSentence, kSummaryFile };

/// Fills Example::secondary. With a summary file (tab-separated id and
/// text per line) ids missing from the file fall back to the first
/// sentence. Returns the number of fallbacks.
std::size_t attach_secondary(std::vector<Example>& examples, SecondarySource source,
                             const std::filesystem::path& summary_file = {});

/// Replaces each answer by its secondary input, keeping the original
/// answer's sentence and word counts.
void use_secondary_as_source(std::vector<Example>& examples);

/// Line-delimited JSON: {id, answer, question, secondary, answer_sentences,
/// answer_words}; text fields hold space-joined tokens.
void write_dataset(const std::filesystem::path& path, std::span<const Example> examples);
std::vector<Example> read_dataset(const std::filesystem::path& path);

}  // namespace laqg::data
