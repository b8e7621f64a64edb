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

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "laqg/data/example.hpp"

namespace laqg::data {

/// Per-record outcome counts of an ingestion pass.
struct IngestStats {
  std::size_t records = 0;
  std::size_t retained = 0;
  std::size_t malformed = 0;
  std::size_t no_long_answer = 0;
  std::size_t not_paragraph = 0;
  std::size_t empty_question = 0;
  std::size_t empty_answer = 0;
  /// Retained records that carried more than one long-answer annotation;
  /// only the first was used.
  std::size_t multi_annotation = 0;
};

struct IngestResult {
  std::vector<Example> examples;
  IngestStats stats;
};

/// Reads simplified Natural Questions records (one JSON object per line
/// with document_text, question_text and annotations[].long_answer
/// {start_token, end_token}). Keeps records whose first long-answer
/// annotation starts with the `<P>` token; the span is de-tagged,
/// lowercased and tokenized. Bad lines are skipped, counted and reported
/// on stderr.
IngestResult ingest_nq(std::istream& in, bool quiet = false);
IngestResult ingest_nq(const std::filesystem::path& path, bool quiet = false);

}  // namespace laqg::data
