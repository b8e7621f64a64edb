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
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace laqg::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Stable 64-bit FNV-1a digest as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Starts a run manifest for `stage` with the tool version filled in.
nlohmann::ordered_json new_manifest(std::string_view stage);

/// Sets "run_id" to a digest of every field except "run_id" and "created",
/// then stamps "created"; identical inputs and seeds give identical ids.
void seal_manifest(nlohmann::ordered_json& manifest);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
nlohmann::json read_json(const std::filesystem::path& path);
/// The manifest stored beside an artifact: "<file>.manifest.json", or
/// "manifest.json" in the artifact's directory; nullopt when neither exists.
std::optional<nlohmann::json> sibling_manifest(const std::filesystem::path& artifact);
std::filesystem::path manifest_path_for(const std::filesystem::path& artifact);

/// DataError explaining the skew when two vocabulary hashes differ.
void require_same_vocab(const std::string& expected, const std::string& actual, std::string_view what);

}  // namespace laqg::cli
