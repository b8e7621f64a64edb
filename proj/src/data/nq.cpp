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

#include "laqg/data/nq.hpp"

#include <cctype>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "laqg/error.hpp"

namespace laqg::data {

using nlohmann::json;

namespace {

struct Span {
  long long start = -1;
  long long end = -1;
};

bool is_paragraph_open(std::string_view token) {
  return token.size() == 3 && token[0] == '<' && (token[1] == 'P' || token[1] == 'p') &&
         token[2] == '>';
}

std::vector<std::string_view> whitespace_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string record_id(const json& rec, std::size_t lineno) {
  if (rec.contains("example_id")) {
    const auto& id = rec["example_id"];
    if (id.is_string()) return id.get<std::string>();
    if (id.is_number_integer()) return std::to_string(id.get<long long>());
    if (id.is_number_unsigned()) return std::to_string(id.get<unsigned long long>());
  }
  return "line-" + std::to_string(lineno);
}

}  // namespace

IngestResult ingest_nq(std::istream& in, bool quiet) {
  IngestResult result;
  auto& st = result.stats;
  auto warn = [&](std::size_t lineno, const std::string& what) {
    if (!quiet) std::cerr << "warning: NQ line " << lineno << ": " << what << '\n';
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++st.records;
    json rec;
    std::vector<Span> spans;
    std::string document, question_text;
    try {
      rec = json::parse(line);
      document = rec.at("document_text").get<std::string>();
      question_text = rec.at("question_text").get<std::string>();
      for (const auto& ann : rec.value("annotations", json::array())) {
        if (!ann.contains("long_answer")) continue;
        const auto& la = ann["long_answer"];
        Span s{la.at("start_token").get<long long>(), la.at("end_token").get<long long>()};
        if (s.start >= 0 && s.end > s.start) spans.push_back(s);
      }
    } catch (const json::exception& e) {
      ++st.malformed;
      warn(lineno, std::string("malformed record skipped (") + e.what() + ")");
      continue;
    }
    if (spans.empty()) {
      ++st.no_long_answer;
      continue;
    }
    const auto doc = whitespace_tokens(document);
    const Span span = spans.front();
    if (static_cast<std::size_t>(span.end) > doc.size()) {
      ++st.malformed;
      warn(lineno, "long-answer span exceeds the document");
      continue;
    }
    if (!is_paragraph_open(doc[span.start])) {
      ++st.not_paragraph;
      continue;
    }
    std::string text;
    for (long long i = span.start; i < span.end; ++i) {
      text += doc[i];
      text.push_back(' ');
    }
    Tokens answer = tokenize(text);
    Tokens question = tokenize(question_text);
    if (question.empty()) {
      ++st.empty_question;
      warn(lineno, "empty question skipped");
      continue;
    }
    if (answer.empty()) {
      ++st.empty_answer;
      warn(lineno, "long answer is empty after removing markup");
      continue;
    }
    if (spans.size() > 1) ++st.multi_annotation;
    result.examples.push_back(
        make_example(record_id(rec, lineno), std::move(answer), std::move(question)));
    ++st.retained;
  }
  return result;
}

IngestResult ingest_nq(const std::filesystem::path& path, bool quiet) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read NQ file " + path.string());
  return ingest_nq(in, quiet);
}

}  // namespace laqg::data
