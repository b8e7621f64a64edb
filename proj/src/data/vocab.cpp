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

#include "laqg/data/vocab.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include "laqg/data/example.hpp"
#include "laqg/error.hpp"

namespace laqg::data {

namespace {
const std::vector<std::string> kReservedTokens = {"<pad>", "<bos>", "<eos>", "<unk>"};
}

Vocab::Vocab() {
  for (const auto& t : kReservedTokens) add(t);
}

Vocab::Vocab(std::span<const std::string> tokens) : Vocab() {
  for (const auto& t : tokens) {
    if (ids_.count(t)) throw DataError("duplicate vocabulary token: " + t);
    add(t);
  }
}

void Vocab::add(const std::string& token) {
  ids_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

int Vocab::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw DataError("token id " + std::to_string(id) + " outside vocabulary of " +
                    std::to_string(tokens_.size()));
  }
  return tokens_[id];
}

std::vector<int> Vocab::encode(std::span<const std::string> tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

std::vector<std::string> Vocab::decode(std::span<const int> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write vocabulary " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read vocabulary " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.size() < kReservedTokens.size() ||
      !std::equal(kReservedTokens.begin(), kReservedTokens.end(), lines.begin())) {
    throw DataError("vocabulary " + path.string() + " does not start with the reserved tokens");
  }
  return Vocab(std::span<const std::string>(lines).subspan(kReservedTokens.size()));
}

std::string Vocab::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h ^= '\n';
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Vocab build_vocab(std::span<const Example> examples, std::size_t max_size) {
  if (examples.empty()) throw ContractError("build_vocab: empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& ex : examples) {
    for (const auto& t : ex.answer) ++counts[t];
    for (const auto& t : ex.question) ++counts[t];
    if (ex.secondary)
      for (const auto& t : *ex.secondary) ++counts[t];
  }
  for (const auto& r : kReservedTokens) counts.erase(r);
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_size) ranked.resize(max_size);
  std::vector<std::string> tokens;
  tokens.reserve(ranked.size());
  for (auto& [t, _] : ranked) tokens.push_back(t);
  return Vocab(tokens);
}

}  // namespace laqg::data
