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

#include "laqg/cli/manifest.hpp"

#include <chrono>
#include <fstream>

#include "fmt/chrono.h"
#include "fmt/format.h"
#include "laqg/error.hpp"

namespace laqg::cli {

namespace fs = std::filesystem;

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

nlohmann::ordered_json new_manifest(std::string_view stage) {
  nlohmann::ordered_json m;
  m["run_id"] = "";
  m["stage"] = stage;
  m["tool_version"] = kToolVersion;
  return m;
}

void seal_manifest(nlohmann::ordered_json& manifest) {
  nlohmann::ordered_json content = manifest;
  content.erase("run_id");
  content.erase("created");
  manifest["run_id"] = fnv1a_hex(content.dump());
  manifest["created"] = fmt::format("{:%Y-%m-%dT%H:%M:%S}Z",
                                    std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

fs::path manifest_path_for(const fs::path& artifact) { return fs::path(artifact.string() + ".manifest.json"); }

std::optional<nlohmann::json> sibling_manifest(const fs::path& artifact) {
  const fs::path own = manifest_path_for(artifact);
  if (fs::exists(own)) return read_json(own);
  const fs::path dir_manifest = artifact.parent_path() / "manifest.json";
  if (fs::exists(dir_manifest)) return read_json(dir_manifest);
  return std::nullopt;
}

void require_same_vocab(const std::string& expected, const std::string& actual, std::string_view what) {
  if (expected != actual) {
    throw DataError(fmt::format("vocabulary mismatch for {}: expected hash {}, found {}; the data was prepared "
                                "with a different vocabulary than the model was trained on",
                                what, expected, actual));
  }
}

}  // namespace laqg::cli
