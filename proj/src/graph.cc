// Copyright 2026 The ESAL Authors.
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

#include "esal/graph.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "esal/errors.h"

namespace esal {

namespace {

template <typename T>
void RequireRank2(const Tensor<T>& t, const char* op) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected rank-2 tensor, got " + ShapeString(t.shape()));
  }
}

template <typename T>
void RequireSameShape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + ShapeString(a.shape()) + " vs " +
                     ShapeString(b.shape()));
  }
}

template <typename T>
T StableSigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T, typename F>
Var<T> Unary(Var<T> x, F forward, T (*derivative)(T x, T y)) {
  const Tensor<T>& xv = x.value();
  Tensor<T> out(xv.shape());
  for (int64_t i = 0; i < xv.size(); ++i) out[i] = forward(xv[i]);
  return x.graph->Record(std::move(out), {x}, [xi = x.id, derivative](Graph<T>& g, int self) {
    if (!g.RequiresGrad(xi)) return;
    const Tensor<T>& xv = g.ValueOf(xi);
    const Tensor<T>& yv = g.ValueOf(self);
    const Tensor<T>& dy = g.GradOf(self);
    Tensor<T>& dx = g.GradBuffer(xi);
    for (int64_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * derivative(xv[i], yv[i]);
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph

template <typename T>
Var<T> Graph<T>::Push(Node node) {
  nodes_.push_back(std::move(node));
  return Var<T>{this, static_cast<int>(nodes_.size()) - 1};
}

template <typename T>
Var<T> Graph<T>::Constant(Tensor<T> value) {
  Node n;
  n.value = std::move(value);
  return Push(std::move(n));
}

template <typename T>
Var<T> Graph<T>::Input(Tensor<T> value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return Push(std::move(n));
}

template <typename T>
Var<T> Graph<T>::Param(const std::string& name, const Tensor<T>& value) {
  auto it = param_ids_.find(name);
  if (it != param_ids_.end()) {
    if (nodes_[it->second].external != &value) {
      throw ContractError("parameter '" + name + "' bound to two different tensors");
    }
    return Var<T>{this, it->second};
  }
  Node n;
  n.external = &value;
  n.requires_grad = true;
  Var<T> v = Push(std::move(n));
  param_ids_.emplace(name, v.id);
  return v;
}

template <typename T>
const Tensor<T>& Graph<T>::ValueOf(int id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.value;
}

template <typename T>
const Tensor<T>& Graph<T>::Value(Var<T> v) const {
  if (v.graph != this || v.id < 0 || v.id >= size()) throw ContractError("foreign or invalid Var");
  return ValueOf(v.id);
}

template <typename T>
Tensor<T> Graph<T>::Grad(Var<T> v) const {
  const Node& n = nodes_.at(v.id);
  if (n.grad.shape().empty()) return Tensor<T>(ValueOf(v.id).shape());
  return n.grad;
}

template <typename T>
Tensor<T>& Graph<T>::GradBuffer(int id) {
  Node& n = nodes_[id];
  if (n.grad.shape().empty()) n.grad = Tensor<T>(ValueOf(id).shape());
  return n.grad;
}

template <typename T>
Var<T> Graph<T>::Record(Tensor<T> value, std::initializer_list<Var<T>> inputs,
                        BackwardFn backward) {
  return Record(std::move(value), std::vector<Var<T>>(inputs), std::move(backward));
}

template <typename T>
Var<T> Graph<T>::Record(Tensor<T> value, const std::vector<Var<T>>& inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const auto& in : inputs) {
    if (in.graph != this) throw ContractError("op mixes Vars from different graphs");
    n.requires_grad = n.requires_grad || nodes_[in.id].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return Push(std::move(n));
}

template <typename T>
void Graph<T>::Backward(Var<T> loss) {
  if (backward_done_) throw ContractError("Backward called twice on the same graph");
  if (Value(loss).size() != 1) {
    throw ContractError("Backward needs a scalar loss, got shape " +
                        ShapeString(Value(loss).shape()));
  }
  backward_done_ = true;
  if (!nodes_[loss.id].requires_grad) return;
  GradBuffer(loss.id)[0] = T(1);
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || !n.backward || n.grad.shape().empty()) continue;
    n.backward(*this, id);
  }
}

template <typename T>
std::map<std::string, Tensor<T>> Graph<T>::ParamGrads() const {
  std::map<std::string, Tensor<T>> out;
  for (const auto& [name, id] : param_ids_) {
    const Node& n = nodes_[id];
    out.emplace(name, n.grad.shape().empty() ? Tensor<T>(ValueOf(id).shape()) : n.grad);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ops

template <typename T>
Var<T> MatMul(Var<T> a, Var<T> b) {
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  RequireRank2(av, "MatMul");
  RequireRank2(bv, "MatMul");
  if (av.cols() != bv.rows()) {
    throw ShapeError("MatMul: inner dimensions differ: " + ShapeString(av.shape()) + " x " +
                     ShapeString(bv.shape()));
  }
  const int m = av.rows(), k = av.cols(), n = bv.cols();
  Tensor<T> out({m, n});
  kernels::Gemm(av.data(), bv.data(), out.data(), m, k, n, false);
  return a.graph->Record(
      std::move(out), {a, b}, [ai = a.id, bi = b.id, m, k, n](Graph<T>& g, int self) {
        const Tensor<T>& dc = g.GradOf(self);
        if (g.RequiresGrad(ai)) {
          kernels::GemmNtAcc(dc.data(), g.ValueOf(bi).data(), g.GradBuffer(ai).data(), m, n, k);
        }
        if (g.RequiresGrad(bi)) {
          kernels::GemmTnAcc(g.ValueOf(ai).data(), dc.data(), g.GradBuffer(bi).data(), m, k, n);
        }
      });
}

template <typename T>
Var<T> Transpose(Var<T> a) {
  const Tensor<T>& av = a.value();
  RequireRank2(av, "Transpose");
  const int m = av.rows(), n = av.cols();
  Tensor<T> out({n, m});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.at(j, i) = av.at(i, j);
  return a.graph->Record(std::move(out), {a}, [ai = a.id, m, n](Graph<T>& g, int self) {
    if (!g.RequiresGrad(ai)) return;
    const Tensor<T>& dy = g.GradOf(self);
    Tensor<T>& da = g.GradBuffer(ai);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) da.at(i, j) += dy.at(j, i);
  });
}

template <typename T>
Var<T> Add(Var<T> a, Var<T> b) {
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  RequireSameShape(av, bv, "Add");
  Tensor<T> out(av.shape());
  for (int64_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
  return a.graph->Record(std::move(out), {a, b}, [ai = a.id, bi = b.id](Graph<T>& g, int self) {
    const Tensor<T>& dy = g.GradOf(self);
    for (int in : {ai, bi}) {
      if (!g.RequiresGrad(in)) continue;
      Tensor<T>& d = g.GradBuffer(in);
      for (int64_t i = 0; i < d.size(); ++i) d[i] += dy[i];
    }
  });
}

template <typename T>
Var<T> Sub(Var<T> a, Var<T> b) {
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  RequireSameShape(av, bv, "Sub");
  Tensor<T> out(av.shape());
  for (int64_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[i];
  return a.graph->Record(std::move(out), {a, b}, [ai = a.id, bi = b.id](Graph<T>& g, int self) {
    const Tensor<T>& dy = g.GradOf(self);
    if (g.RequiresGrad(ai)) {
      Tensor<T>& d = g.GradBuffer(ai);
      for (int64_t i = 0; i < d.size(); ++i) d[i] += dy[i];
    }
    if (g.RequiresGrad(bi)) {
      Tensor<T>& d = g.GradBuffer(bi);
      for (int64_t i = 0; i < d.size(); ++i) d[i] -= dy[i];
    }
  });
}

template <typename T>
Var<T> Mul(Var<T> a, Var<T> b) {
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  RequireSameShape(av, bv, "Mul");
  Tensor<T> out(av.shape());
  for (int64_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
  return a.graph->Record(std::move(out), {a, b}, [ai = a.id, bi = b.id](Graph<T>& g, int self) {
    const Tensor<T>& dy = g.GradOf(self);
    if (g.RequiresGrad(ai)) {
      const Tensor<T>& bv = g.ValueOf(bi);
      Tensor<T>& d = g.GradBuffer(ai);
      for (int64_t i = 0; i < d.size(); ++i) d[i] += dy[i] * bv[i];
    }
    if (g.RequiresGrad(bi)) {
      const Tensor<T>& av = g.ValueOf(ai);
      Tensor<T>& d = g.GradBuffer(bi);
      for (int64_t i = 0; i < d.size(); ++i) d[i] += dy[i] * av[i];
    }
  });
}

template <typename T>
Var<T> Tanh(Var<T> x) {
  return Unary<T>(x, [](T v) { return std::tanh(v); }, +[](T, T y) { return T(1) - y * y; });
}

template <typename T>
Var<T> Sigmoid(Var<T> x) {
  return Unary<T>(x, [](T v) { return StableSigmoid(v); }, +[](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Var<T> Exp(Var<T> x) {
  return Unary<T>(x, [](T v) { return std::exp(v); }, +[](T, T y) { return y; });
}

template <typename T>
Var<T> Log(Var<T> x) {
  for (T v : x.value().values()) {
    if (!(v > T(0))) throw ContractError("Log of a non-positive value");
  }
  return Unary<T>(x, [](T v) { return std::log(v); }, +[](T xv, T) { return T(1) / xv; });
}

template <typename T>
Var<T> Relu(Var<T> x) {
  return Unary<T>(
      x, [](T v) { return v > T(0) ? v : T(0); }, +[](T xv, T) { return xv > T(0) ? T(1) : T(0); });
}

template <typename T>
Var<T> Scale(Var<T> x, T factor) {
  const Tensor<T>& xv = x.value();
  Tensor<T> out(xv.shape());
  for (int64_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * factor;
  return x.graph->Record(std::move(out), {x}, [xi = x.id, factor](Graph<T>& g, int self) {
    if (!g.RequiresGrad(xi)) return;
    const Tensor<T>& dy = g.GradOf(self);
    Tensor<T>& dx = g.GradBuffer(xi);
    for (int64_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * factor;
  });
}

template <typename T>
Var<T> MulScalar(Var<T> x, Var<T> s) {
  const Tensor<T>& xv = x.value();
  const Tensor<T>& sv = s.value();
  if (sv.size() != 1)
    throw ShapeError("MulScalar: scalar operand has shape " + ShapeString(sv.shape()));
  const T factor = sv[0];
  Tensor<T> out(xv.shape());
  for (int64_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * factor;
  return x.graph->Record(std::move(out), {x, s}, [xi = x.id, si = s.id](Graph<T>& g, int self) {
    const Tensor<T>& dy = g.GradOf(self);
    const Tensor<T>& xv = g.ValueOf(xi);
    if (g.RequiresGrad(xi)) {
      const T factor = g.ValueOf(si)[0];
      Tensor<T>& dx = g.GradBuffer(xi);
      for (int64_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * factor;
    }
    if (g.RequiresGrad(si)) {
      T acc = 0;
      for (int64_t i = 0; i < xv.size(); ++i) acc += dy[i] * xv[i];
      g.GradBuffer(si)[0] += acc;
    }
  });
}

template <typename T>
Var<T> AddBias(Var<T> x, Var<T> bias) {
  const Tensor<T>& xv = x.value();
  const Tensor<T>& bv = bias.value();
  RequireRank2(xv, "AddBias");
  if (bv.size() != xv.cols()) {
    throw ShapeError("AddBias: bias " + ShapeString(bv.shape()) + " does not fit " +
                     ShapeString(xv.shape()));
  }
  const int m = xv.rows(), n = xv.cols();
  Tensor<T> out(xv.shape());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = xv.at(i, j) + bv[j];
  return x.graph->Record(std::move(out), {x, bias},
                         [xi = x.id, bi = bias.id, m, n](Graph<T>& g, int self) {
                           const Tensor<T>& dy = g.GradOf(self);
                           if (g.RequiresGrad(xi)) {
                             Tensor<T>& dx = g.GradBuffer(xi);
                             for (int64_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
                           }
                           if (g.RequiresGrad(bi)) {
                             Tensor<T>& db = g.GradBuffer(bi);
                             for (int i = 0; i < m; ++i)
                               for (int j = 0; j < n; ++j) db[j] += dy.at(i, j);
                           }
                         });
}

template <typename T>
Var<T> ScaleRows(Var<T> x, Var<T> v) {
  const Tensor<T>& xv = x.value();
  const Tensor<T>& vv = v.value();
  RequireRank2(xv, "ScaleRows");
  if (vv.size() != xv.rows()) {
    throw ShapeError("ScaleRows: scale " + ShapeString(vv.shape()) + " does not fit " +
                     ShapeString(xv.shape()));
  }
  const int m = xv.rows(), n = xv.cols();
  Tensor<T> out(xv.shape());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = xv.at(i, j) * vv[i];
  return x.graph->Record(std::move(out), {x, v},
                         [xi = x.id, vi = v.id, m, n](Graph<T>& g, int self) {
                           const Tensor<T>& dy = g.GradOf(self);
                           if (g.RequiresGrad(xi)) {
                             const Tensor<T>& vv = g.ValueOf(vi);
                             Tensor<T>& dx = g.GradBuffer(xi);
                             for (int i = 0; i < m; ++i)
                               for (int j = 0; j < n; ++j) dx.at(i, j) += dy.at(i, j) * vv[i];
                           }
                           if (g.RequiresGrad(vi)) {
                             const Tensor<T>& xv = g.ValueOf(xi);
                             Tensor<T>& dv = g.GradBuffer(vi);
                             for (int i = 0; i < m; ++i) {
                               T acc = 0;
                               for (int j = 0; j < n; ++j) acc += dy.at(i, j) * xv.at(i, j);
                               dv[i] += acc;
                             }
                           }
                         });
}

template <typename T>
Var<T> Concat(const std::vector<Var<T>>& parts, int axis) {
  if (parts.empty()) throw ShapeError("Concat: no inputs");
  if (axis != 0 && axis != 1) throw ShapeError("Concat: axis must be 0 or 1");
  Graph<T>* graph = parts.front().graph;
  const Tensor<T>& first = parts.front().value();
  RequireRank2(first, "Concat");
  std::vector<int> extents;
  int total = 0;
  for (const auto& p : parts) {
    const Tensor<T>& pv = p.value();
    RequireRank2(pv, "Concat");
    const int keep = axis == 0 ? pv.cols() : pv.rows();
    if (keep != (axis == 0 ? first.cols() : first.rows())) {
      throw ShapeError("Concat: incompatible shapes " + ShapeString(first.shape()) + " and " +
                       ShapeString(pv.shape()) + " along axis " + std::to_string(axis));
    }
    extents.push_back(axis == 0 ? pv.rows() : pv.cols());
    total += extents.back();
  }
  const int rows = axis == 0 ? total : first.rows();
  const int cols = axis == 0 ? first.cols() : total;
  Tensor<T> out({rows, cols});
  int offset = 0;
  for (size_t k = 0; k < parts.size(); ++k) {
    const Tensor<T>& pv = parts[k].value();
    for (int i = 0; i < pv.rows(); ++i)
      for (int j = 0; j < pv.cols(); ++j) {
        if (axis == 0)
          out.at(offset + i, j) = pv.at(i, j);
        else
          out.at(i, offset + j) = pv.at(i, j);
      }
    offset += extents[k];
  }
  std::vector<int> ids;
  for (const auto& p : parts) ids.push_back(p.id);
  return graph->Record(std::move(out), parts, [ids, extents, axis](Graph<T>& g, int self) {
    const Tensor<T>& dy = g.GradOf(self);
    int offset = 0;
    for (size_t k = 0; k < ids.size(); ++k) {
      if (g.RequiresGrad(ids[k])) {
        Tensor<T>& d = g.GradBuffer(ids[k]);
        for (int i = 0; i < d.rows(); ++i)
          for (int j = 0; j < d.cols(); ++j)
            d.at(i, j) += axis == 0 ? dy.at(offset + i, j) : dy.at(i, offset + j);
      }
      offset += extents[k];
    }
  });
}

template <typename T>
Var<T> Slice(Var<T> x, int axis, int begin, int end) {
  const Tensor<T>& xv = x.value();
  RequireRank2(xv, "Slice");
  if (axis != 0 && axis != 1) throw ShapeError("Slice: axis must be 0 or 1");
  const int extent = axis == 0 ? xv.rows() : xv.cols();
  if (begin < 0 || end > extent || begin >= end) {
    throw ShapeError("Slice: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") invalid for " + ShapeString(xv.shape()) + " axis " + std::to_string(axis));
  }
  const int rows = axis == 0 ? end - begin : xv.rows();
  const int cols = axis == 0 ? xv.cols() : end - begin;
  Tensor<T> out({rows, cols});
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      out.at(i, j) = axis == 0 ? xv.at(begin + i, j) : xv.at(i, begin + j);
  return x.graph->Record(std::move(out), {x},
                         [xi = x.id, axis, begin, rows, cols](Graph<T>& g, int self) {
                           if (!g.RequiresGrad(xi)) return;
                           const Tensor<T>& dy = g.GradOf(self);
                           Tensor<T>& dx = g.GradBuffer(xi);
                           for (int i = 0; i < rows; ++i)
                             for (int j = 0; j < cols; ++j) {
                               if (axis == 0)
                                 dx.at(begin + i, j) += dy.at(i, j);
                               else
                                 dx.at(i, begin + j) += dy.at(i, j);
                             }
                         });
}

template <typename T>
Var<T> Reshape(Var<T> x, int rows, int cols) {
  Tensor<T> out = x.value();
  out.Reshape({rows, cols});
  return x.graph->Record(std::move(out), {x}, [xi = x.id](Graph<T>& g, int self) {
    if (!g.RequiresGrad(xi)) return;
    const Tensor<T>& dy = g.GradOf(self);
    Tensor<T>& dx = g.GradBuffer(xi);
    for (int64_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
  });
}

template <typename T>
Var<T> GatherRows(Var<T> table, std::span<const int> ids) {
  const Tensor<T>& tv = table.value();
  RequireRank2(tv, "GatherRows");
  const int n = static_cast<int>(ids.size());
  const int d = tv.cols();
  Tensor<T> out({n, d});
  for (int i = 0; i < n; ++i) {
    if (ids[i] < 0 || ids[i] >= tv.rows()) {
      throw std::out_of_range("GatherRows: id " + std::to_string(ids[i]) + " outside table of " +
                              std::to_string(tv.rows()) + " rows");
    }
    std::copy_n(tv.row(ids[i]).data(), d, out.row(i).data());
  }
  std::vector<int> idv(ids.begin(), ids.end());
  return table.graph->Record(std::move(out), {table},
                             [ti = table.id, idv = std::move(idv), d](Graph<T>& g, int self) {
                               if (!g.RequiresGrad(ti)) return;
                               const Tensor<T>& dy = g.GradOf(self);
                               Tensor<T>& dt = g.GradBuffer(ti);
                               for (size_t i = 0; i < idv.size(); ++i) {
                                 T* dst = dt.row(idv[i]).data();
                                 const T* src = dy.row(static_cast<int>(i)).data();
                                 for (int j = 0; j < d; ++j) dst[j] += src[j];
                               }
                             });
}

template <typename T>
Var<T> Sum(Var<T> x) {
  T acc = 0;
  for (T v : x.value().values()) acc += v;
  return x.graph->Record(Tensor<T>({1, 1}, acc), {x}, [xi = x.id](Graph<T>& g, int self) {
    if (!g.RequiresGrad(xi)) return;
    const T dy = g.GradOf(self)[0];
    Tensor<T>& dx = g.GradBuffer(xi);
    for (int64_t i = 0; i < dx.size(); ++i) dx[i] += dy;
  });
}

template <typename T>
Var<T> Mean(Var<T> x) {
  const int64_t count = x.value().size();
  if (count == 0) throw ShapeError("Mean of an empty tensor");
  return Scale(Sum(x), T(1) / static_cast<T>(count));
}

template <typename T>
Var<T> SumAxis(Var<T> x, int axis) {
  const Tensor<T>& xv = x.value();
  RequireRank2(xv, "SumAxis");
  if (axis != 0 && axis != 1) throw ShapeError("SumAxis: axis must be 0 or 1");
  const int m = xv.rows(), n = xv.cols();
  Tensor<T> out(axis == 0 ? std::vector<int>{1, n} : std::vector<int>{m, 1});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[axis == 0 ? j : i] += xv.at(i, j);
  return x.graph->Record(std::move(out), {x}, [xi = x.id, axis, m, n](Graph<T>& g, int self) {
    if (!g.RequiresGrad(xi)) return;
    const Tensor<T>& dy = g.GradOf(self);
    Tensor<T>& dx = g.GradBuffer(xi);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) dx.at(i, j) += dy[axis == 0 ? j : i];
  });
}

template <typename T>
Var<T> MeanAxis(Var<T> x, int axis) {
  const Tensor<T>& xv = x.value();
  RequireRank2(xv, "MeanAxis");
  const int count = axis == 0 ? xv.rows() : xv.cols();
  if (count == 0) throw ShapeError("MeanAxis over an empty axis");
  return Scale(SumAxis(x, axis), T(1) / static_cast<T>(count));
}

template <typename T>
Var<T> MaxReduce(Var<T> x, int axis) {
  const Tensor<T>& xv = x.value();
  RequireRank2(xv, "MaxReduce");
  if (axis != 0 && axis != 1) throw ShapeError("MaxReduce: axis must be 0 or 1");
  const int m = xv.rows(), n = xv.cols();
  if (m == 0 || n == 0) throw ShapeError("MaxReduce of an empty tensor");
  const int outer = axis == 0 ? n : m;
  const int inner = axis == 0 ? m : n;
  Tensor<T> out(axis == 0 ? std::vector<int>{1, n} : std::vector<int>{m, 1});
  std::vector<int> argmax(outer);
  for (int o = 0; o < outer; ++o) {
    int best = 0;
    T best_v = axis == 0 ? xv.at(0, o) : xv.at(o, 0);
    for (int k = 1; k < inner; ++k) {
      const T v = axis == 0 ? xv.at(k, o) : xv.at(o, k);
      if (v > best_v) {
        best_v = v;
        best = k;
      }
    }
    out[o] = best_v;
    argmax[o] = best;
  }
  return x.graph->Record(std::move(out), {x},
                         [xi = x.id, axis, argmax = std::move(argmax)](Graph<T>& g, int self) {
                           if (!g.RequiresGrad(xi)) return;
                           const Tensor<T>& dy = g.GradOf(self);
                           Tensor<T>& dx = g.GradBuffer(xi);
                           for (size_t o = 0; o < argmax.size(); ++o) {
                             const int oi = static_cast<int>(o);
                             if (axis == 0)
                               dx.at(argmax[o], oi) += dy[oi];
                             else
                               dx.at(oi, argmax[o]) += dy[oi];
                           }
                         });
}

template <typename T>
Var<T> SoftmaxRows(Var<T> x) {
  const Tensor<T>& xv = x.value();
  RequireRank2(xv, "SoftmaxRows");
  const int m = xv.rows(), n = xv.cols();
  Tensor<T> out(xv.shape());
  for (int i = 0; i < m; ++i) {
    auto in = xv.row(i);
    auto o = out.row(i);
    const T mx = *std::max_element(in.begin(), in.end());
    T z = 0;
    for (int j = 0; j < n; ++j) {
      o[j] = std::exp(in[j] - mx);
      z += o[j];
    }
    for (int j = 0; j < n; ++j) o[j] /= z;
  }
  return x.graph->Record(std::move(out), {x}, [xi = x.id, m, n](Graph<T>& g, int self) {
    if (!g.RequiresGrad(xi)) return;
    const Tensor<T>& y = g.ValueOf(self);
    const Tensor<T>& dy = g.GradOf(self);
    Tensor<T>& dx = g.GradBuffer(xi);
    for (int i = 0; i < m; ++i) {
      T dot = 0;
      for (int j = 0; j < n; ++j) dot += dy.at(i, j) * y.at(i, j);
      for (int j = 0; j < n; ++j) dx.at(i, j) += y.at(i, j) * (dy.at(i, j) - dot);
    }
  });
}

template <typename T>
Var<T> LstmSequence(Var<T> x, Var<T> w_ih, Var<T> w_hh, Var<T> bias, bool reverse) {
  const Tensor<T>& xv = x.value();
  const Tensor<T>& wi = w_ih.value();
  const Tensor<T>& wh = w_hh.value();
  const Tensor<T>& bv = bias.value();
  RequireRank2(xv, "LstmSequence");
  RequireRank2(wi, "LstmSequence");
  RequireRank2(wh, "LstmSequence");
  const int n = xv.rows(), d = xv.cols(), h = wh.rows(), g4 = 4 * wh.rows();
  if (wi.rows() != d || wi.cols() != g4 || wh.cols() != g4 || bv.size() != g4) {
    throw ShapeError("LstmSequence: inconsistent shapes x" + ShapeString(xv.shape()) + " w_ih" +
                     ShapeString(wi.shape()) + " w_hh" + ShapeString(wh.shape()) + " b" +
                     ShapeString(bv.shape()));
  }
  if (n == 0) throw ShapeError("LstmSequence: empty sequence");

  // acts rows hold post-nonlinearity gates (i, f, g, o); cells holds c_t.
  Tensor<T> acts({n, g4});
  kernels::Gemm(xv.data(), wi.data(), acts.data(), n, d, g4, false);
  Tensor<T> cells({n, h});
  Tensor<T> out({n, h});
  std::vector<T> h_prev(h, T(0)), c_prev(h, T(0));
  for (int s = 0; s < n; ++s) {
    const int t = reverse ? n - 1 - s : s;
    T* z = acts.row(t).data();
    for (int j = 0; j < g4; ++j) z[j] += bv[j];
    for (int k = 0; k < h; ++k) {
      const T hk = h_prev[k];
      if (hk == T(0)) continue;
      const T* wrow = wh.data() + int64_t{k} * g4;
      for (int j = 0; j < g4; ++j) z[j] += hk * wrow[j];
    }
    T* c = cells.row(t).data();
    T* ht = out.row(t).data();
    for (int k = 0; k < h; ++k) {
      const T ig = StableSigmoid(z[k]);
      const T fg = StableSigmoid(z[h + k]);
      const T gg = std::tanh(z[2 * h + k]);
      const T og = StableSigmoid(z[3 * h + k]);
      z[k] = ig;
      z[h + k] = fg;
      z[2 * h + k] = gg;
      z[3 * h + k] = og;
      c[k] = fg * c_prev[k] + ig * gg;
      ht[k] = og * std::tanh(c[k]);
    }
    std::copy_n(c, h, c_prev.begin());
    std::copy_n(ht, h, h_prev.begin());
  }

  Graph<T>* graph = x.graph;
  return graph->Record(
      std::move(out), {x, w_ih, w_hh, bias},
      [xi = x.id, wii = w_ih.id, whi = w_hh.id, bi = bias.id, acts = std::move(acts),
       cells = std::move(cells), n, d, h, g4, reverse](Graph<T>& g, int self) {
        const Tensor<T>& dout = g.GradOf(self);
        const Tensor<T>& hs = g.ValueOf(self);
        const Tensor<T>& wh = g.ValueOf(whi);
        Tensor<T> dz({n, g4});
        std::vector<T> dh_next(h, T(0)), dc_next(h, T(0));
        for (int s = n - 1; s >= 0; --s) {
          const int t = reverse ? n - 1 - s : s;
          const int prev = reverse ? t + 1 : t - 1;
          const bool has_prev = s > 0;
          const T* a = acts.row(t).data();
          const T* c = cells.row(t).data();
          T* dzt = dz.row(t).data();
          for (int k = 0; k < h; ++k) {
            const T ig = a[k], fg = a[h + k], gg = a[2 * h + k], og = a[3 * h + k];
            const T tc = std::tanh(c[k]);
            const T dh = dout.at(t, k) + dh_next[k];
            const T dc = dh * og * (T(1) - tc * tc) + dc_next[k];
            const T c_prev = has_prev ? cells.at(prev, k) : T(0);
            dzt[k] = dc * gg * ig * (T(1) - ig);
            dzt[h + k] = dc * c_prev * fg * (T(1) - fg);
            dzt[2 * h + k] = dc * ig * (T(1) - gg * gg);
            dzt[3 * h + k] = dh * tc * og * (T(1) - og);
            dc_next[k] = dc * fg;
          }
          // dh_prev = dz_t * W_hh^T
          std::fill(dh_next.begin(), dh_next.end(), T(0));
          if (has_prev) kernels::GemmNtAcc(dzt, wh.data(), dh_next.data(), 1, g4, h);
          if (g.RequiresGrad(whi) && has_prev) {
            kernels::GemmTnAcc(hs.row(prev).data(), dzt, g.GradBuffer(whi).data(), 1, h, g4);
          }
        }
        if (g.RequiresGrad(bi)) {
          Tensor<T>& db = g.GradBuffer(bi);
          for (int t = 0; t < n; ++t)
            for (int j = 0; j < g4; ++j) db[j] += dz.at(t, j);
        }
        if (g.RequiresGrad(wii)) {
          kernels::GemmTnAcc(g.ValueOf(xi).data(), dz.data(), g.GradBuffer(wii).data(), n, d, g4);
        }
        if (g.RequiresGrad(xi)) {
          kernels::GemmNtAcc(dz.data(), g.ValueOf(wii).data(), g.GradBuffer(xi).data(), n, g4, d);
        }
      });
}

template <typename T>
Var<T> BceWithLogits(Var<T> logits, const Tensor<T>& targets) {
  const Tensor<T>& zv = logits.value();
  RequireSameShape(zv, targets, "BceWithLogits");
  if (zv.size() == 0) throw ShapeError("BceWithLogits: empty input");
  T acc = 0;
  for (int64_t i = 0; i < zv.size(); ++i) {
    const T y = targets[i];
    if (y != T(0) && y != T(1)) throw ContractError("BceWithLogits: targets must be 0 or 1");
    const T z = zv[i];
    acc += std::max(z, T(0)) - z * y + std::log1p(std::exp(-std::abs(z)));
  }
  const T count = static_cast<T>(zv.size());
  return logits.graph->Record(Tensor<T>({1, 1}, acc / count), {logits},
                              [zi = logits.id, targets, count](Graph<T>& g, int self) {
                                if (!g.RequiresGrad(zi)) return;
                                const T dl = g.GradOf(self)[0] / count;
                                const Tensor<T>& zv = g.ValueOf(zi);
                                Tensor<T>& dz = g.GradBuffer(zi);
                                for (int64_t i = 0; i < dz.size(); ++i) {
                                  dz[i] += dl * (StableSigmoid(zv[i]) - targets[i]);
                                }
                              });
}

#define ESAL_INSTANTIATE_GRAPH(T)                                        \
  template class Graph<T>;                                               \
  template Var<T> MatMul<T>(Var<T>, Var<T>);                             \
  template Var<T> Transpose<T>(Var<T>);                                  \
  template Var<T> Add<T>(Var<T>, Var<T>);                                \
  template Var<T> Sub<T>(Var<T>, Var<T>);                                \
  template Var<T> Mul<T>(Var<T>, Var<T>);                                \
  template Var<T> Tanh<T>(Var<T>);                                       \
  template Var<T> Sigmoid<T>(Var<T>);                                    \
  template Var<T> Exp<T>(Var<T>);                                        \
  template Var<T> Log<T>(Var<T>);                                        \
  template Var<T> Relu<T>(Var<T>);                                       \
  template Var<T> Scale<T>(Var<T>, T);                                   \
  template Var<T> MulScalar<T>(Var<T>, Var<T>);                          \
  template Var<T> AddBias<T>(Var<T>, Var<T>);                            \
  template Var<T> ScaleRows<T>(Var<T>, Var<T>);                          \
  template Var<T> Concat<T>(const std::vector<Var<T>>&, int);            \
  template Var<T> Slice<T>(Var<T>, int, int, int);                       \
  template Var<T> Reshape<T>(Var<T>, int, int);                          \
  template Var<T> GatherRows<T>(Var<T>, std::span<const int>);           \
  template Var<T> Sum<T>(Var<T>);                                        \
  template Var<T> Mean<T>(Var<T>);                                       \
  template Var<T> SumAxis<T>(Var<T>, int);                               \
  template Var<T> MeanAxis<T>(Var<T>, int);                              \
  template Var<T> MaxReduce<T>(Var<T>, int);                             \
  template Var<T> SoftmaxRows<T>(Var<T>);                                \
  template Var<T> LstmSequence<T>(Var<T>, Var<T>, Var<T>, Var<T>, bool); \
  template Var<T> BceWithLogits<T>(Var<T>, const Tensor<T>&);

ESAL_INSTANTIATE_GRAPH(float)
ESAL_INSTANTIATE_GRAPH(double)

}  // namespace esal
