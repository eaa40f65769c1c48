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

// Tape-based reverse-mode automatic differentiation.
//
// A Graph records nodes in creation order, which is already a topological
// order; Backward() walks the tape once in reverse. Every op takes and
// returns Var handles; all ops are rank-2 and never broadcast except where
// the op name says so (Scale, MulScalar, AddBias, ScaleRows).
//
// A graph is single-use: calling Backward() a second time throws
// ContractError. Build a new graph per forward pass.

#ifndef ESAL_GRAPH_H_
#define ESAL_GRAPH_H_

#include <deque>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "esal/tensor.h"

namespace esal {

template <typename T>
class Graph;

template <typename T>
struct Var {
  Graph<T>* graph = nullptr;
  int id = -1;

  const Tensor<T>& value() const { return graph->Value(*this); }
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }
};

template <typename T>
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, int self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Non-differentiable input.
  Var<T> Constant(Tensor<T> value);
  // Differentiable input owned by the graph.
  Var<T> Input(Tensor<T> value);
  // Differentiable view of an externally owned parameter; the tensor must
  // outlive the graph. Repeated calls with the same name return one node.
  Var<T> Param(const std::string& name, const Tensor<T>& value);

  const Tensor<T>& Value(Var<T> v) const;
  // Zero tensor when no gradient reached the node.
  Tensor<T> Grad(Var<T> v) const;
  bool RequiresGrad(int id) const { return nodes_[id].requires_grad; }

  // Seeds d(loss)=1 and propagates. loss must hold exactly one element.
  void Backward(Var<T> loss);

  // Gradients of every Param node, by name.
  std::map<std::string, Tensor<T>> ParamGrads() const;
  const std::map<std::string, int>& params() const { return param_ids_; }

  int size() const { return static_cast<int>(nodes_.size()); }

  // Op-author interface.
  Var<T> Record(Tensor<T> value, std::initializer_list<Var<T>> inputs, BackwardFn backward);
  Var<T> Record(Tensor<T> value, const std::vector<Var<T>>& inputs, BackwardFn backward);
  // Gradient buffer of a node, allocated as zeros on first use.
  Tensor<T>& GradBuffer(int id);
  const Tensor<T>& GradOf(int id) const { return nodes_[id].grad; }
  const Tensor<T>& ValueOf(int id) const;

 private:
  struct Node {
    Tensor<T> value;
    const Tensor<T>* external = nullptr;
    Tensor<T> grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var<T> Push(Node node);

  std::deque<Node> nodes_;  // stable addresses across Record()
  std::map<std::string, int> param_ids_;
  bool backward_done_ = false;
};

// Linear algebra.
template <typename T> Var<T> MatMul(Var<T> a, Var<T> b);
template <typename T> Var<T> Transpose(Var<T> a);

// Elementwise, same shape.
template <typename T> Var<T> Add(Var<T> a, Var<T> b);
template <typename T> Var<T> Sub(Var<T> a, Var<T> b);
template <typename T> Var<T> Mul(Var<T> a, Var<T> b);
template <typename T> Var<T> Tanh(Var<T> x);
template <typename T> Var<T> Sigmoid(Var<T> x);
template <typename T> Var<T> Exp(Var<T> x);
template <typename T> Var<T> Log(Var<T> x);
// Subgradient 0 at x == 0.
template <typename T> Var<T> Relu(Var<T> x);

// Scalar-tensor products.
template <typename T> Var<T> Scale(Var<T> x, T factor);
template <typename T> Var<T> MulScalar(Var<T> x, Var<T> s);  // s is [1,1]
// x[m,n] + bias[1,n] added to every row.
template <typename T> Var<T> AddBias(Var<T> x, Var<T> bias);
// x[m,n] with row i multiplied by v[i,0].
template <typename T> Var<T> ScaleRows(Var<T> x, Var<T> v);

// Structure.
template <typename T> Var<T> Concat(const std::vector<Var<T>>& parts, int axis);
template <typename T> Var<T> Slice(Var<T> x, int axis, int begin, int end);
template <typename T> Var<T> Reshape(Var<T> x, int rows, int cols);
// out[i] = table[ids[i]]; backward scatter-adds.
template <typename T> Var<T> GatherRows(Var<T> table, std::span<const int> ids);

// Reductions. Sum/Mean reduce everything to [1,1]. Axis 0 reduces rows
// (result [1,n]); axis 1 reduces columns (result [m,1]).
template <typename T> Var<T> Sum(Var<T> x);
template <typename T> Var<T> Mean(Var<T> x);
template <typename T> Var<T> SumAxis(Var<T> x, int axis);
template <typename T> Var<T> MeanAxis(Var<T> x, int axis);
// Gradient goes to the first maximal element along the axis.
template <typename T> Var<T> MaxReduce(Var<T> x, int axis);

// Row-wise softmax with max subtraction.
template <typename T> Var<T> SoftmaxRows(Var<T> x);

// One LSTM direction over x[n,d]: gates (i, f, g, o) packed along the
// columns of w_ih[d,4h], w_hh[h,4h], bias[1,4h]; zero initial state. With
// reverse=true the recurrence runs from the last position to the first.
// Output row t is the hidden state at position t, shape [n,h].
template <typename T>
Var<T> LstmSequence(Var<T> x, Var<T> w_ih, Var<T> w_hh, Var<T> bias, bool reverse);

// Mean binary cross-entropy from logits over all elements:
//   mean(max(z,0) - z*y + log(1 + exp(-|z|)))
// gradient (sigmoid(z) - y) / count. targets must be 0/1 and match shape.
template <typename T> Var<T> BceWithLogits(Var<T> logits, const Tensor<T>& targets);

}  // namespace esal

#endif  // ESAL_GRAPH_H_
