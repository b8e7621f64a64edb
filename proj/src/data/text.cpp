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

#include "laqg/data/text.hpp"

#include <algorithm>
#include <iterator>
#include <cctype>

namespace laqg::data {

namespace {

// Stored without the trailing period.
constexpr std::string_view kAbbreviations[] = {
    "mr",   "mrs",  "ms",   "dr",   "prof", "sr",   "jr",   "st",   "vs",   "etc",
    "e.g",  "i.e",  "u.s",  "u.k",  "inc",  "ltd",  "co",   "corp", "jan",
    "feb",  "mar",  "apr",  "jun",  "jul",  "aug",  "sep",  "sept", "oct",  "nov",
    "dec",  "gen",  "gov",  "sen",  "rep",  "rev",  "lt",   "col"};

bool is_punct_char(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

bool is_terminator(std::string_view t) { return t == "." || t == "!" || t == "?"; }

void split_chunk(std::string_view chunk, Tokens& out) {
  std::size_t begin = 0, end = chunk.size();
  while (begin < end && is_punct_char(chunk[begin])) out.emplace_back(1, chunk[begin++]);
  if (begin == end) return;
  std::string_view core = chunk.substr(begin, end - begin);
  if (core.back() == '.' && is_abbreviation(core)) {
    out.emplace_back(core);
    return;
  }
  std::size_t stop = end;
  while (stop > begin && is_punct_char(chunk[stop - 1])) --stop;
  out.emplace_back(chunk.substr(begin, stop - begin));
  for (std::size_t i = stop; i < end; ++i) out.emplace_back(1, chunk[i]);
}

}  // namespace

std::string strip_tags(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '<') {
      const auto close = text.find('>', i + 1);
      if (close != std::string_view::npos) {
        out.push_back(' ');
        i = close;
        continue;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

bool is_punctuation(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), is_punct_char);
}

bool is_abbreviation(std::string_view token) {
  if (!token.empty() && token.back() == '.') token.remove_suffix(1);
  return std::find(std::begin(kAbbreviations), std::end(kAbbreviations), token) !=
         std::end(kAbbreviations);
}

Tokens tokenize(std::string_view text) {
  std::string clean = strip_tags(text);
  for (auto& c : clean) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  Tokens out;
  std::size_t i = 0;
  while (i < clean.size()) {
    while (i < clean.size() && std::isspace(static_cast<unsigned char>(clean[i]))) ++i;
    std::size_t j = i;
    while (j < clean.size() && !std::isspace(static_cast<unsigned char>(clean[j]))) ++j;
    if (j > i) split_chunk(std::string_view(clean).substr(i, j - i), out);
    i = j;
  }
  return out;
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Tokens first_sentence(std::span<const std::string> tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_terminator(tokens[i])) continue;
    // "dr ." split by an upstream tokenizer is still an abbreviation.
    if (tokens[i] == "." && i > 0 && is_abbreviation(tokens[i - 1])) continue;
    std::size_t end = i + 1;
    while (end < tokens.size() && is_terminator(tokens[end])) ++end;
    return Tokens(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return Tokens(tokens.begin(), tokens.end());
}

std::vector<Tokens> split_sentences(std::span<const std::string> tokens) {
  std::vector<Tokens> sentences;
  while (!tokens.empty()) {
    Tokens s = first_sentence(tokens);
    tokens = tokens.subspan(s.size());
    sentences.push_back(std::move(s));
  }
  return sentences;
}

std::size_t count_words(std::span<const std::string> tokens) {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const std::string& t) { return !is_punctuation(t); }));
}

}  // namespace laqg::data
