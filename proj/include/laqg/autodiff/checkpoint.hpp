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
#include <map>
#include <string>

#include "laqg/autodiff/graph.hpp"

namespace laqg::ad {

/// On-disk layout (all integers little-endian):
///   magic "LAQGCKPT", u32 format version, u32 header length, header bytes
///   (a JSON object), u32 tensor count, then per tensor: u32 name length,
///   name bytes, u32 rank, u32 dims[rank], f32 data[product(dims)].
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::string header_json;
  std::map<std::string, Tensor> tensors;
};

void save_checkpoint(const std::filesystem::path& path, const std::string& header_json,
                     const ParameterStore& params);

Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Copies every tensor into the parameter of the same name. Missing,
/// unexpected or mis-shaped tensors are a DataError.
void load_parameters(const Checkpoint& ckpt, ParameterStore& params);

}  // namespace laqg::ad
