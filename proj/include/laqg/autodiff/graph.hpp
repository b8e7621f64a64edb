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
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "laqg/autodiff/tensor.hpp"

namespace laqg::ad {

/// A trainable tensor that outlives any single graph.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter(std::string n, Tensor v);
  void zero_grad() { grad.fill(0.0); }
};

/// Named, ordered collection of parameters. Insertion order is the
/// serialization and optimizer order.
class ParameterStore {
 public:
  Parameter& add(const std::string& name, Tensor value);
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;
  void zero_grad();

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.cbegin(); }
  auto end() const { return params_.cend(); }

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

class Graph;

/// Handle to a node of a Graph. Cheap to copy; valid while its graph lives.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, std::uint32_t id) : graph_(graph), id_(id) {}

  Graph& graph() const { return *graph_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

  const Tensor& value() const;
  const Tensor& grad() const;
  bool requires_grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  Graph* graph_ = nullptr;
  std::uint32_t id_ = 0;
};

/// Tape of operations for one forward/backward pass. Single owner; build it,
/// call backward once, then drop it.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::uint32_t self)>;

  explicit Graph(bool training = false, std::uint64_t seed = 0);
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  /// Leaf that never receives a gradient.
  Var constant(Tensor value);
  /// Leaf that records a gradient readable through Var::grad().
  Var input(Tensor value);
  /// Leaf bound to a parameter; backward adds into Parameter::grad.
  /// Repeated calls for the same parameter return the same node.
  Var param(Parameter& p);

  /// Records an operation result. `backward` is invoked only when the node
  /// has an incoming gradient and `requires_grad` is set.
  Var record(Tensor value, bool requires_grad, BackwardFn backward);

  /// Reverse sweep from a scalar loss. `seed` scales the initial gradient.
  void backward(Var loss, double seed = 1.0);

  const Tensor& value(std::uint32_t id) const;
  const Tensor& grad(std::uint32_t id) const;
  bool requires_grad(std::uint32_t id) const { return nodes_[id].requires_grad; }
  bool has_grad(std::uint32_t id) const { return !nodes_[id].grad.empty(); }
  /// Gradient buffer of a node, allocated to zeros on first use.
  Tensor& grad_buffer(std::uint32_t id);

  bool training() const { return training_; }
  void set_training(bool training) { training_ = training; }
  std::mt19937_64& rng() { return rng_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    BackwardFn backward;
  };

  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, std::uint32_t> param_nodes_;
  bool training_;
  std::mt19937_64 rng_;
  bool consumed_ = false;
};

}  // namespace laqg::ad
