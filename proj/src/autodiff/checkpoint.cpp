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

#include "laqg/autodiff/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "laqg/error.hpp"

namespace laqg::ad {

namespace {

constexpr char kMagic[8] = {'L', 'A', 'Q', 'G', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in, const std::filesystem::path& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw DataError("truncated checkpoint: " + path.string());
  }
  return v;
}

std::string get_bytes(std::istream& in, std::size_t n, const std::filesystem::path& path) {
  std::string s(n, '\0');
  if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw DataError("truncated checkpoint: " + path.string());
  }
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const std::string& header_json,
                     const ParameterStore& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(header_json.size()));
  out.write(header_json.data(), static_cast<std::streamsize>(header_json.size()));
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    put_u32(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    const Shape& shape = p->value.shape();
    put_u32(out, static_cast<std::uint32_t>(shape.size()));
    for (auto d : shape) put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : p->value.data()) {
      const float f = static_cast<float>(v);
      out.write(reinterpret_cast<const char*>(&f), sizeof f);
    }
  }
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw DataError("not a checkpoint file: " + path.string());
  }
  const auto version = get_u32(in, path);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.header_json = get_bytes(in, get_u32(in, path), path);
  const auto count = get_u32(in, path);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = get_bytes(in, get_u32(in, path), path);
    const auto rank = get_u32(in, path);
    Shape shape;
    std::size_t n = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      shape.push_back(get_u32(in, path));
      n *= shape.back();
    }
    std::vector<float> raw(n);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * sizeof(float)))) {
      throw DataError("truncated checkpoint: " + path.string());
    }
    ckpt.tensors.emplace(std::move(name), Tensor(shape, std::vector<double>(raw.begin(), raw.end())));
  }
  return ckpt;
}

void load_parameters(const Checkpoint& ckpt, ParameterStore& params) {
  if (ckpt.tensors.size() != params.size()) {
    throw DataError("checkpoint holds " + std::to_string(ckpt.tensors.size()) +
                    " tensors, model expects " + std::to_string(params.size()));
  }
  for (auto& p : params) {
    auto it = ckpt.tensors.find(p->name);
    if (it == ckpt.tensors.end()) throw DataError("checkpoint is missing tensor " + p->name);
    if (it->second.shape() != p->value.shape()) {
      throw DataError("checkpoint tensor " + p->name + " has shape " +
                      shape_string(it->second.shape()) + ", config implies " +
                      shape_string(p->value.shape()));
    }
    p->value = it->second;
  }
}

}  // namespace laqg::ad
