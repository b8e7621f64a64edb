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

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace laqg::data {

using Tokens = std::vector<std::string>;

/// Removes every `<...>` markup tag, replacing it with a space.
std::string strip_tags(std::string_view text);

/// Lowercases (ASCII), strips tags and splits on whitespace. Leading and
/// trailing punctuation of each chunk becomes separate one-character
/// tokens, except for chunks on the abbreviation list ("dr.", "e.g.").
Tokens tokenize(std::string_view text);

std::string detokenize(std::span<const std::string> tokens);

/// True for tokens made only of ASCII punctuation.
bool is_punctuation(std::string_view token);

/// True for entries of the fixed abbreviation list, with or without the
/// trailing period ("dr." and "dr").
bool is_abbreviation(std::string_view token);

/// Tokens up to and including the first sentence terminator (".", "!",
/// "?") that is not part of an abbreviation; the whole input when none.
Tokens first_sentence(std::span<const std::string> tokens);

/// Repeated application of first_sentence until the input is consumed.
std::vector<Tokens> split_sentences(std::span<const std::string> tokens);

std::size_t count_words(std::span<const std::string> tokens);

}  // namespace laqg::data
