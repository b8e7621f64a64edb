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
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace laqg::data {

struct Example;

/// Token <-> id map with reserved ids PAD=0, BOS=1, EOS=2, UNK=3.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kReserved = 4;

  Vocab();
  /// Reserved tokens followed by `tokens` in id order.
  explicit Vocab(std::span<const std::string> tokens);

  int id(const std::string& token) const;
  const std::string& token(int id) const;
  bool contains(const std::string& token) const { return ids_.count(token) != 0; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const int> ids) const;

  /// One token per line, line number = id.
  void save(const std::filesystem::path& path) const;
  static Vocab load(const std::filesystem::path& path);
  /// FNV-1a over the serialized form, as 16 hex digits.
  std::string hash() const;

 private:
  void add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

/// Counts tokens of answers, questions and secondary inputs; keeps the
/// `max_size` most frequent (ties in lexicographic order) after the
/// reserved ids.
Vocab build_vocab(std::span<const Example> examples, std::size_t max_size);

}  // namespace laqg::data
