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

#include "laqg/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "laqg/error.hpp"

namespace laqg::ad {

namespace {

using Id = std::uint32_t;

Tensor as_matrix(const Tensor& t) {
  Tensor out = t;
  if (t.rank() == 2) return out;
  return Tensor({t.rows(), t.cols()}, std::vector<double>(t.data().begin(), t.data().end()));
}

Graph& same_graph(Var a, Var b, const char* op) {
  if (&a.graph() != &b.graph()) {
    throw ContractError(std::string(op) + ": operands belong to different graphs");
  }
  return a.graph();
}

void check_same_shape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.value().shape()) +
                         " vs " + shape_string(b.value().shape()));
  }
}

// c += op(a) * op(b)
void gemm(const Tensor& a, bool ta, const Tensor& b, bool tb, Tensor& c) {
  const std::size_t m = ta ? a.cols() : a.rows();
  const std::size_t k = ta ? a.rows() : a.cols();
  const std::size_t n = tb ? b.rows() : b.cols();
  const std::size_t acols = a.cols();
  const std::size_t bcols = b.cols();
  const double* A = a.data().data();
  const double* B = b.data().data();
  double* C = c.data().data();
  if (!ta && !tb) {
    for (std::size_t i = 0; i < m; ++i) {
      double* crow = C + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const double aip = A[i * acols + p];
        if (aip == 0.0) continue;
        const double* brow = B + p * bcols;
        for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
      }
    }
  } else if (!ta && tb) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* arow = A + i * acols;
      for (std::size_t j = 0; j < n; ++j) {
        const double* brow = B + j * bcols;
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
        C[i * n + j] += s;
      }
    }
  } else if (ta && !tb) {
    for (std::size_t p = 0; p < k; ++p) {
      const double* arow = A + p * acols;
      const double* brow = B + p * bcols;
      for (std::size_t i = 0; i < m; ++i) {
        const double api = arow[i];
        if (api == 0.0) continue;
        double* crow = C + i * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += api * brow[j];
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += A[p * acols + i] * B[j * bcols + p];
        C[i * n + j] += s;
      }
  }
}

template <typename F, typename D>
Var unary(Var a, F forward, D derivative) {
  Tensor out = as_matrix(a.value());
  for (auto& v : out.data()) v = forward(v);
  const Id ia = a.id();
  return a.graph().record(std::move(out), a.requires_grad(), [ia, derivative](Graph& g, Id self) {
    const Tensor& y = g.value(self);
    const Tensor& gy = g.grad(self);
    Tensor& ga = g.grad_buffer(ia);
    const Tensor& x = g.value(ia);
    for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * derivative(x[i], y[i]);
  });
}

std::size_t check_groups(std::span<const int> group_of, std::size_t cols, std::size_t groups,
                         const char* op) {
  if (group_of.size() != cols) {
    throw DimensionError(std::string(op) + ": group map has " + std::to_string(group_of.size()) +
                         " entries for " + std::to_string(cols) + " columns");
  }
  std::vector<char> seen(groups, 0);
  for (int gidx : group_of) {
    if (gidx < 0 || static_cast<std::size_t>(gidx) >= groups) {
      throw ContractError(std::string(op) + ": group id out of range");
    }
    seen[gidx] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw ContractError(std::string(op) + ": every group needs at least one column");
  }
  return groups;
}

}  // namespace

Var add(Var a, Var b) {
  Graph& g = same_graph(a, b, "add");
  check_same_shape(a, b, "add");
  Tensor out = as_matrix(a.value());
  out.accumulate(b.value());
  const Id ia = a.id(), ib = b.id();
  return g.record(std::move(out), a.requires_grad() || b.requires_grad(),
                  [ia, ib](Graph& g, Id self) {
                    const Tensor& gy = g.grad(self);
                    if (g.requires_grad(ia)) g.grad_buffer(ia).accumulate(gy);
                    if (g.requires_grad(ib)) g.grad_buffer(ib).accumulate(gy);
                  });
}

Var sub(Var a, Var b) {
  Graph& g = same_graph(a, b, "sub");
  check_same_shape(a, b, "sub");
  Tensor out = as_matrix(a.value());
  out.accumulate(b.value(), -1.0);
  const Id ia = a.id(), ib = b.id();
  return g.record(std::move(out), a.requires_grad() || b.requires_grad(),
                  [ia, ib](Graph& g, Id self) {
                    const Tensor& gy = g.grad(self);
                    if (g.requires_grad(ia)) g.grad_buffer(ia).accumulate(gy);
                    if (g.requires_grad(ib)) g.grad_buffer(ib).accumulate(gy, -1.0);
                  });
}

Var mul(Var a, Var b) {
  Graph& g = same_graph(a, b, "mul");
  check_same_shape(a, b, "mul");
  Tensor out = as_matrix(a.value());
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const Id ia = a.id(), ib = b.id();
  return g.record(std::move(out), a.requires_grad() || b.requires_grad(),
                  [ia, ib](Graph& g, Id self) {
                    const Tensor& gy = g.grad(self);
                    const Tensor& av = g.value(ia);
                    const Tensor& bv = g.value(ib);
                    if (g.requires_grad(ia)) {
                      Tensor& ga = g.grad_buffer(ia);
                      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * bv[i];
                    }
                    if (g.requires_grad(ib)) {
                      Tensor& gb = g.grad_buffer(ib);
                      for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i] * av[i];
                    }
                  });
}

Var scale(Var a, double factor) {
  Tensor out = as_matrix(a.value());
  for (auto& v : out.data()) v *= factor;
  const Id ia = a.id();
  return a.graph().record(std::move(out), a.requires_grad(), [ia, factor](Graph& g, Id self) {
    g.grad_buffer(ia).accumulate(g.grad(self), factor);
  });
}

Var add_row(Var a, Var row) {
  Graph& g = same_graph(a, row, "add_row");
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw DimensionError("add_row: cannot broadcast " + shape_string(row.value().shape()) +
                         " over " + shape_string(a.value().shape()));
  }
  Tensor out = as_matrix(a.value());
  const Tensor& rv = row.value();
  const std::size_t n = out.cols();
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) += rv[c];
  const Id ia = a.id(), ir = row.id();
  return g.record(std::move(out), a.requires_grad() || row.requires_grad(),
                  [ia, ir](Graph& g, Id self) {
                    const Tensor& gy = g.grad(self);
                    if (g.requires_grad(ia)) g.grad_buffer(ia).accumulate(gy);
                    if (g.requires_grad(ir)) {
                      Tensor& gr = g.grad_buffer(ir);
                      const std::size_t n = gy.cols();
                      for (std::size_t r = 0; r < gy.rows(); ++r)
                        for (std::size_t c = 0; c < n; ++c) gr[c] += gy(r, c);
                    }
                  });
}

Var mul_row(Var a, Var row) {
  Graph& g = same_graph(a, row, "mul_row");
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw DimensionError("mul_row: cannot broadcast " + shape_string(row.value().shape()) +
                         " over " + shape_string(a.value().shape()));
  }
  Tensor out = as_matrix(a.value());
  const Tensor& rv = row.value();
  const std::size_t n = out.cols();
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) *= rv[c];
  const Id ia = a.id(), ir = row.id();
  return g.record(std::move(out), a.requires_grad() || row.requires_grad(),
                  [ia, ir](Graph& g, Id self) {
                    const Tensor& gy = g.grad(self);
                    const Tensor& av = g.value(ia);
                    const Tensor& rv = g.value(ir);
                    const std::size_t n = gy.cols();
                    if (g.requires_grad(ia)) {
                      Tensor& ga = g.grad_buffer(ia);
                      for (std::size_t r = 0; r < gy.rows(); ++r)
                        for (std::size_t c = 0; c < n; ++c) ga[r * n + c] += gy(r, c) * rv[c];
                    }
                    if (g.requires_grad(ir)) {
                      Tensor& gr = g.grad_buffer(ir);
                      for (std::size_t r = 0; r < gy.rows(); ++r)
                        for (std::size_t c = 0; c < n; ++c) gr[c] += gy(r, c) * av[r * n + c];
                    }
                  });
}

Var matmul(Var a, Var b) {
  Graph& g = same_graph(a, b, "matmul");
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions disagree for " +
                         shape_string(a.value().shape()) + " x " +
                         shape_string(b.value().shape()));
  }
  Tensor out = Tensor::matrix(a.rows(), b.cols());
  gemm(a.value(), false, b.value(), false, out);
  const Id ia = a.id(), ib = b.id();
  return g.record(std::move(out), a.requires_grad() || b.requires_grad(),
                  [ia, ib](Graph& g, Id self) {
                    const Tensor& gy = g.grad(self);
                    if (g.requires_grad(ia)) gemm(gy, false, g.value(ib), true, g.grad_buffer(ia));
                    if (g.requires_grad(ib)) gemm(g.value(ia), true, gy, false, g.grad_buffer(ib));
                  });
}

Var matmul_nt(Var a, Var b) {
  Graph& g = same_graph(a, b, "matmul_nt");
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: inner dimensions disagree for " +
                         shape_string(a.value().shape()) + " x " +
                         shape_string(b.value().shape()) + "^T");
  }
  Tensor out = Tensor::matrix(a.rows(), b.rows());
  gemm(a.value(), false, b.value(), true, out);
  const Id ia = a.id(), ib = b.id();
  return g.record(std::move(out), a.requires_grad() || b.requires_grad(),
                  [ia, ib](Graph& g, Id self) {
                    const Tensor& gy = g.grad(self);
                    if (g.requires_grad(ia)) gemm(gy, false, g.value(ib), false, g.grad_buffer(ia));
                    if (g.requires_grad(ib)) gemm(gy, true, g.value(ia), false, g.grad_buffer(ib));
                  });
}

Var transpose(Var a) {
  const Tensor& av = a.value();
  Tensor out = Tensor::matrix(av.cols(), av.rows());
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) out(c, r) = av(r, c);
  const Id ia = a.id();
  return a.graph().record(std::move(out), a.requires_grad(), [ia](Graph& g, Id self) {
    const Tensor& gy = g.grad(self);
    Tensor& ga = g.grad_buffer(ia);
    for (std::size_t r = 0; r < gy.rows(); ++r)
      for (std::size_t c = 0; c < gy.cols(); ++c) ga(c, r) += gy(r, c);
  });
}

Var tanh(Var a) {
  return unary(a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var relu(Var a) {
  return unary(a, [](double x) { return x > 0 ? x : 0.0; },
               [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Var softmax_rows(Var a) {
  Tensor out = as_matrix(a.value());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row_span(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (auto& v : row) z += (v = std::exp(v - mx));
    for (auto& v : row) v /= z;
  }
  const Id ia = a.id();
  return a.graph().record(std::move(out), a.requires_grad(), [ia](Graph& g, Id self) {
    const Tensor& y = g.value(self);
    const Tensor& gy = g.grad(self);
    Tensor& ga = g.grad_buffer(ia);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      auto yr = y.row_span(r);
      auto gr = gy.row_span(r);
      double dot = 0.0;
      for (std::size_t c = 0; c < yr.size(); ++c) dot += yr[c] * gr[c];
      auto ar = ga.row_span(r);
      for (std::size_t c = 0; c < yr.size(); ++c) ar[c] += yr[c] * (gr[c] - dot);
    }
  });
}

Var log_softmax_rows(Var a) {
  Tensor out = as_matrix(a.value());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row_span(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double v : row) z += std::exp(v - mx);
    const double lse = mx + std::log(z);
    for (auto& v : row) v -= lse;
  }
  const Id ia = a.id();
  return a.graph().record(std::move(out), a.requires_grad(), [ia](Graph& g, Id self) {
    const Tensor& y = g.value(self);
    const Tensor& gy = g.grad(self);
    Tensor& ga = g.grad_buffer(ia);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      auto yr = y.row_span(r);
      auto gr = gy.row_span(r);
      double total = 0.0;
      for (double v : gr) total += v;
      auto ar = ga.row_span(r);
      for (std::size_t c = 0; c < yr.size(); ++c) ar[c] += gr[c] - std::exp(yr[c]) * total;
    }
  });
}

Var normalize_rows(Var a, double eps) {
  Tensor out = as_matrix(a.value());
  const std::size_t n = out.cols();
  std::vector<double> inv_std(out.rows());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row_span(r);
    double mu = 0.0;
    for (double v : row) mu += v;
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (double v : row) var += (v - mu) * (v - mu);
    var /= static_cast<double>(n);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (auto& v : row) v = (v - mu) * inv_std[r];
  }
  const Id ia = a.id();
  return a.graph().record(
      std::move(out), a.requires_grad(), [ia, inv_std = std::move(inv_std)](Graph& g, Id self) {
        const Tensor& y = g.value(self);
        const Tensor& gy = g.grad(self);
        Tensor& ga = g.grad_buffer(ia);
        const double n = static_cast<double>(y.cols());
        for (std::size_t r = 0; r < y.rows(); ++r) {
          auto yr = y.row_span(r);
          auto gr = gy.row_span(r);
          double mean_g = 0.0, mean_gy = 0.0;
          for (std::size_t c = 0; c < yr.size(); ++c) {
            mean_g += gr[c];
            mean_gy += gr[c] * yr[c];
          }
          mean_g /= n;
          mean_gy /= n;
          auto ar = ga.row_span(r);
          for (std::size_t c = 0; c < yr.size(); ++c)
            ar[c] += inv_std[r] * (gr[c] - mean_g - yr[c] * mean_gy);
        }
      });
}

Var dropout(Var a, double rate) {
  Graph& g = a.graph();
  if (!g.training() || rate <= 0.0) return a;
  if (rate >= 1.0) throw ConfigError("dropout rate must be < 1");
  Tensor mask(Shape{a.rows(), a.cols()}, 0.0);
  std::bernoulli_distribution keep(1.0 - rate);
  const double s = 1.0 / (1.0 - rate);
  for (auto& m : mask.data()) m = keep(g.rng()) ? s : 0.0;
  Tensor out = as_matrix(a.value());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  const Id ia = a.id();
  return g.record(std::move(out), a.requires_grad(),
                  [ia, mask = std::move(mask)](Graph& g, Id self) {
                    const Tensor& gy = g.grad(self);
                    Tensor& ga = g.grad_buffer(ia);
                    for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * mask[i];
                  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  Graph& g = parts[0].graph();
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  bool needs = false;
  for (const Var& p : parts) {
    if (&p.graph() != &g) throw ContractError("concat_cols: operands belong to different graphs");
    if (p.rows() != rows) {
      throw DimensionError("concat_cols: row counts differ (" + std::to_string(rows) + " vs " +
                           std::to_string(p.rows()) + ")");
    }
    cols += p.cols();
    needs = needs || p.requires_grad();
  }
  Tensor out = Tensor::matrix(rows, cols);
  std::vector<Id> ids;
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy(v.row_span(r).begin(), v.row_span(r).end(), out.row_span(r).begin() + off);
    ids.push_back(p.id());
    offsets.push_back(off);
    off += p.cols();
  }
  return g.record(std::move(out), needs, [ids, offsets](Graph& g, Id self) {
    const Tensor& gy = g.grad(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!g.requires_grad(ids[k])) continue;
      Tensor& gp = g.grad_buffer(ids[k]);
      const std::size_t w = gp.cols();
      for (std::size_t r = 0; r < gy.rows(); ++r)
        for (std::size_t c = 0; c < w; ++c) gp(r, c) += gy(r, offsets[k] + c);
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no inputs");
  Graph& g = parts[0].graph();
  const std::size_t cols = parts[0].cols();
  std::size_t rows = 0;
  bool needs = false;
  for (const Var& p : parts) {
    if (&p.graph() != &g) throw ContractError("concat_rows: operands belong to different graphs");
    if (p.cols() != cols) {
      throw DimensionError("concat_rows: column counts differ (" + std::to_string(cols) +
                           " vs " + std::to_string(p.cols()) + ")");
    }
    rows += p.rows();
    needs = needs || p.requires_grad();
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  std::vector<Id> ids;
  for (const Var& p : parts) {
    data.insert(data.end(), p.value().data().begin(), p.value().data().end());
    ids.push_back(p.id());
  }
  return g.record(Tensor({rows, cols}, std::move(data)), needs, [ids](Graph& g, Id self) {
    const Tensor& gy = g.grad(self);
    std::size_t off = 0;
    for (Id id : ids) {
      const std::size_t n = g.value(id).size();
      if (g.requires_grad(id)) {
        Tensor& gp = g.grad_buffer(id);
        for (std::size_t i = 0; i < n; ++i) gp[i] += gy[off + i];
      }
      off += n;
    }
  });
}

Var slice_rows(Var a, std::size_t begin, std::size_t count) {
  if (count == 0 || begin + count > a.rows()) {
    throw DimensionError("slice_rows: [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") outside " +
                         shape_string(a.value().shape()));
  }
  const std::size_t cols = a.cols();
  const auto src = a.value().data().subspan(begin * cols, count * cols);
  Tensor out({count, cols}, std::vector<double>(src.begin(), src.end()));
  const Id ia = a.id();
  return a.graph().record(std::move(out), a.requires_grad(), [ia, begin](Graph& g, Id self) {
    const Tensor& gy = g.grad(self);
    Tensor& ga = g.grad_buffer(ia);
    const std::size_t off = begin * gy.cols();
    for (std::size_t i = 0; i < gy.size(); ++i) ga[off + i] += gy[i];
  });
}

Var slice_cols(Var a, std::size_t begin, std::size_t count) {
  if (count == 0 || begin + count > a.cols()) {
    throw DimensionError("slice_cols: [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") outside " +
                         shape_string(a.value().shape()));
  }
  const Tensor& av = a.value();
  Tensor out = Tensor::matrix(av.rows(), count);
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = av(r, begin + c);
  const Id ia = a.id();
  return a.graph().record(std::move(out), a.requires_grad(), [ia, begin](Graph& g, Id self) {
    const Tensor& gy = g.grad(self);
    Tensor& ga = g.grad_buffer(ia);
    for (std::size_t r = 0; r < gy.rows(); ++r)
      for (std::size_t c = 0; c < gy.cols(); ++c) ga(r, begin + c) += gy(r, c);
  });
}

Var gather_rows(Var table, std::span<const int> ids) {
  if (ids.empty()) throw ContractError("gather_rows: empty id list");
  const Tensor& tv = table.value();
  const std::size_t cols = tv.cols();
  Tensor out = Tensor::matrix(ids.size(), cols);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= tv.rows()) {
      throw DataError("gather_rows: id " + std::to_string(ids[i]) + " outside table of " +
                      std::to_string(tv.rows()) + " rows");
    }
    auto src = tv.row_span(ids[i]);
    std::copy(src.begin(), src.end(), out.row_span(i).begin());
  }
  const Id it = table.id();
  return table.graph().record(
      std::move(out), table.requires_grad(),
      [it, idv = std::vector<int>(ids.begin(), ids.end())](Graph& g, Id self) {
        const Tensor& gy = g.grad(self);
        Tensor& gt = g.grad_buffer(it);
        for (std::size_t i = 0; i < idv.size(); ++i) {
          auto dst = gt.row_span(idv[i]);
          auto src = gy.row_span(i);
          for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
        }
      });
}

Var mask_fill(Var a, const Tensor& mask, double fill) {
  if (mask.size() != a.value().size()) {
    throw DimensionError("mask_fill: mask " + shape_string(mask.shape()) + " does not cover " +
                         shape_string(a.value().shape()));
  }
  Tensor out = as_matrix(a.value());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (mask[i] != 0.0) out[i] = fill;
  const Id ia = a.id();
  return a.graph().record(std::move(out), a.requires_grad(), [ia, mask](Graph& g, Id self) {
    const Tensor& gy = g.grad(self);
    Tensor& ga = g.grad_buffer(ia);
    for (std::size_t i = 0; i < gy.size(); ++i)
      if (mask[i] == 0.0) ga[i] += gy[i];
  });
}

Var segment_sum_cols(Var a, std::span<const int> group_of, std::size_t groups) {
  check_groups(group_of, a.cols(), groups, "segment_sum_cols");
  const Tensor& av = a.value();
  Tensor out = Tensor::matrix(av.rows(), groups);
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) out(r, group_of[c]) += av(r, c);
  const Id ia = a.id();
  return a.graph().record(
      std::move(out), a.requires_grad(),
      [ia, gm = std::vector<int>(group_of.begin(), group_of.end())](Graph& g, Id self) {
        const Tensor& gy = g.grad(self);
        Tensor& ga = g.grad_buffer(ia);
        for (std::size_t r = 0; r < ga.rows(); ++r)
          for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) += gy(r, gm[c]);
      });
}

Var segment_max_cols(Var a, std::span<const int> group_of, std::size_t groups) {
  check_groups(group_of, a.cols(), groups, "segment_max_cols");
  const Tensor& av = a.value();
  Tensor out(Shape{av.rows(), groups}, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> winner(av.rows() * groups, 0);
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) {
      const std::size_t k = group_of[c];
      if (av(r, c) > out(r, k)) {
        out(r, k) = av(r, c);
        winner[r * groups + k] = c;
      }
    }
  const Id ia = a.id();
  return a.graph().record(std::move(out), a.requires_grad(),
                          [ia, groups, winner = std::move(winner)](Graph& g, Id self) {
                            const Tensor& gy = g.grad(self);
                            Tensor& ga = g.grad_buffer(ia);
                            for (std::size_t r = 0; r < gy.rows(); ++r)
                              for (std::size_t k = 0; k < groups; ++k)
                                ga(r, winner[r * groups + k]) += gy(r, k);
                          });
}

Var segment_logsumexp_cols(Var a, std::span<const int> group_of, std::size_t groups) {
  check_groups(group_of, a.cols(), groups, "segment_logsumexp_cols");
  const Tensor& av = a.value();
  const std::size_t rows = av.rows();
  Tensor mx(Shape{rows, groups}, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < av.cols(); ++c)
      mx(r, group_of[c]) = std::max(mx(r, group_of[c]), av(r, c));
  Tensor acc = Tensor::matrix(rows, groups);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < av.cols(); ++c)
      acc(r, group_of[c]) += std::exp(av(r, c) - mx(r, group_of[c]));
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = mx[i] + std::log(acc[i]);
  const Id ia = a.id();
  return a.graph().record(
      std::move(acc), a.requires_grad(),
      [ia, gm = std::vector<int>(group_of.begin(), group_of.end())](Graph& g, Id self) {
        const Tensor& y = g.value(self);
        const Tensor& gy = g.grad(self);
        const Tensor& x = g.value(ia);
        Tensor& ga = g.grad_buffer(ia);
        for (std::size_t r = 0; r < ga.rows(); ++r)
          for (std::size_t c = 0; c < ga.cols(); ++c)
            ga(r, c) += gy(r, gm[c]) * std::exp(x(r, c) - y(r, gm[c]));
      });
}

Var pick(Var a, std::span<const int> index) {
  const Tensor& av = a.value();
  if (index.size() != av.rows()) {
    throw DimensionError("pick: " + std::to_string(index.size()) + " indices for " +
                         std::to_string(av.rows()) + " rows");
  }
  Tensor out = Tensor::matrix(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    if (index[r] < 0 || static_cast<std::size_t>(index[r]) >= av.cols()) {
      throw DataError("pick: index " + std::to_string(index[r]) + " outside " +
                      std::to_string(av.cols()) + " columns");
    }
    out(r, 0) = av(r, index[r]);
  }
  const Id ia = a.id();
  return a.graph().record(
      std::move(out), a.requires_grad(),
      [ia, idx = std::vector<int>(index.begin(), index.end())](Graph& g, Id self) {
        const Tensor& gy = g.grad(self);
        Tensor& ga = g.grad_buffer(ia);
        for (std::size_t r = 0; r < idx.size(); ++r) ga(r, idx[r]) += gy(r, 0);
      });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  const Id ia = a.id();
  return a.graph().record(Tensor::scalar(s), a.requires_grad(), [ia](Graph& g, Id self) {
    const double gy = g.grad(self)[0];
    for (auto& v : g.grad_buffer(ia).data()) v += gy;
  });
}

Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().size())); }

}  // namespace laqg::ad
